#include <gtest/gtest.h>

#include <filesystem>

#include "mplc/stability.hpp"
#include "support.hpp"

using namespace mplc;
using mplc::test::corpus;
using mplc::test::flavour;
using mplc::test::inferred;

namespace {

const auto S = Specificity::Specified;
const auto I = Specificity::Inferred;

std::shared_ptr<const StaticContext> sigma() {
  auto s = StaticContext::builtin();
  s.add_data(DataDecl{"Maybe", {"a"}, {{"Nothing", {}}, {"Just", {tvar("a")}}}});
  return std::make_shared<const StaticContext>(s);
}

FlavourConfig cfg(Depth d, Eagerness e) { return FlavourConfig{d, e}; }

TypingContext with_prelude(const Checker& c) {
  return c.empty_context()
      .with_term("id", parse_type("forall a. a -> a"))
      .with_term("id2", parse_type("forall {a}. a -> a"))
      .with_term("const", parse_type("forall a b. a -> b -> a"))
      .with_term("pair", parse_type("forall a. a -> forall b. b -> (a, b)"));
}

bool wrapper_has_eta(const WrapperPtr& w) {
  if (!w) return false;
  if (w->kind == CoreWrapper::Kind::EtaExpand) return true;
  return wrapper_has_eta(w->outer) || wrapper_has_eta(w->inner);
}

std::vector<Pattern> pats_of(const std::string& eq) { return parse_program(eq).decls.at(0).eqs.at(0).pats; }

ErrorKind error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const TypeError& e) {
    return e.kind;
  }
  ADD_FAILURE() << "expected a type error";
  return ErrorKind::UnboundVariable;
}

}  // namespace

TEST(Flavour, NamesRoundTrip) {
  auto all = FlavourConfig::all();
  ASSERT_EQ(all.size(), 4u);
  for (auto& f : all) {
    auto g = FlavourConfig::parse(f.name());
    ASSERT_TRUE(g);
    EXPECT_EQ(g->depth, f.depth);
    EXPECT_EQ(g->eagerness, f.eagerness);
  }
  EXPECT_FALSE(FlavourConfig::parse("eager-medium"));
}

TEST(Unify, Examples) {
  Checker c(FlavourConfig{}, sigma());
  auto alpha = c.fresh_meta();
  c.unify(alpha, tint());
  EXPECT_TRUE(alpha_equal(c.zonk(alpha), tint()));

  auto a2 = c.fresh_meta(), b2 = c.fresh_meta();
  c.unify(tarrow(a2, tbool()), tarrow(tint(), b2));
  EXPECT_TRUE(alpha_equal(c.zonk(a2), tint()));
  EXPECT_TRUE(alpha_equal(c.zonk(b2), tbool()));

  auto a3 = c.fresh_meta();
  EXPECT_EQ(error_of([&] { c.unify(a3, parse_type("forall a. a -> a")); }), ErrorKind::ImpredicativeInstantiation);
  auto a4 = c.fresh_meta();
  EXPECT_EQ(error_of([&] { c.unify(a4, tarrow(a4, tint())); }), ErrorKind::OccursCheck);
  EXPECT_EQ(error_of([&] { c.unify(tint(), tbool()); }), ErrorKind::ConstructorMismatch);
}

TEST(Binders, Examples) {
  auto t = parse_type("forall a. a -> forall b. b -> b");
  auto d = binders(Depth::Deep, t);
  ASSERT_EQ(d.vars.size(), 2u);
  EXPECT_EQ(d.vars[0].first, "a");
  EXPECT_EQ(d.vars[1].first, "b");
  EXPECT_TRUE(alpha_equal(d.residual, parse_type("a -> b -> b")));
  auto s = binders(Depth::Shallow, t);
  ASSERT_EQ(s.vars.size(), 1u);
  EXPECT_TRUE(alpha_equal(s.residual, parse_type("a -> forall b. b -> b")));
  auto m = binders(Depth::Shallow, parse_type("Int -> Int"));
  EXPECT_TRUE(m.vars.empty());
  EXPECT_TRUE(alpha_equal(m.residual, parse_type("Int -> Int")));
}

TEST(Instantiate, Shallow) {
  Checker c(cfg(Depth::Shallow, Eagerness::Lazy), sigma());
  auto r = c.instantiate(parse_type("forall a. a -> a"));
  ASSERT_TRUE(r.residual->is(Type::Kind::Arrow));
  EXPECT_TRUE(r.residual->dom()->is(Type::Kind::Meta));
  EXPECT_TRUE(alpha_equal(r.residual->dom(), r.residual->cod()));
  ASSERT_EQ(r.args.size(), 1u);
  EXPECT_EQ(r.wrapper->kind, CoreWrapper::Kind::ApplyType);
}

TEST(Instantiate, DeepEtaExpands) {
  Checker c(cfg(Depth::Deep, Eagerness::Lazy), sigma());
  auto r = c.instantiate(parse_type("forall a. a -> forall b. b -> (a, b)"));
  ASSERT_EQ(r.args.size(), 2u);
  auto expect = tarrow(r.args[0], tarrow(r.args[1], tpair(r.args[0], r.args[1])));
  EXPECT_TRUE(alpha_equal(r.residual, expect)) << pretty(r.residual);
  EXPECT_TRUE(wrapper_has_eta(r.wrapper));
}

TEST(Instantiate, MonotypeIsIdentity) {
  for (auto d : {Depth::Deep, Depth::Shallow}) {
    Checker c(cfg(d, Eagerness::Lazy), sigma());
    auto r = c.instantiate(parse_type("Int -> Int"));
    EXPECT_TRUE(alpha_equal(r.residual, parse_type("Int -> Int")));
    EXPECT_TRUE(is_identity(r.wrapper));
  }
}

TEST(Skolemise, Examples) {
  Checker c(FlavourConfig{}, sigma());
  auto ctx = c.empty_context();
  auto s = c.skolemise(ctx, parse_type("forall a. a -> a"), Depth::Shallow);
  ASSERT_TRUE(s.residual->is(Type::Kind::Arrow));
  auto sk = s.residual->dom();
  ASSERT_TRUE(sk->is(Type::Kind::Var));
  EXPECT_TRUE(s.ctx.has_tyvar(sk->name));
  EXPECT_EQ(s.wrapper->kind, CoreWrapper::Kind::TyAbstract);

  auto d = c.skolemise(ctx, parse_type("Int -> forall a. a -> a"), Depth::Deep);
  ASSERT_TRUE(d.residual->is(Type::Kind::Arrow));
  auto inner = d.residual->cod();
  ASSERT_TRUE(inner->is(Type::Kind::Arrow));
  EXPECT_TRUE(inner->dom()->is(Type::Kind::Var));
  EXPECT_TRUE(d.ctx.has_tyvar(inner->dom()->name));
  EXPECT_TRUE(wrapper_has_eta(d.wrapper));

  auto n = c.skolemise(ctx, parse_type("Int -> forall a. a -> a"), Depth::Shallow);
  EXPECT_TRUE(alpha_equal(n.residual, parse_type("Int -> forall a. a -> a")));
  EXPECT_TRUE(is_identity(n.wrapper));
}

TEST(Synthesise, LazyKeepsScheme) {
  for (auto d : {Depth::Deep, Depth::Shallow}) {
    Checker c(cfg(d, Eagerness::Lazy), sigma());
    auto [t, core] = c.synthesise(with_prelude(c), parse_expr("id"));
    EXPECT_TRUE(alpha_equal(c.zonk(t), parse_type("forall a. a -> a")));
  }
}

TEST(Synthesise, EagerInstantiatesTyLam) {
  for (auto d : {Depth::Deep, Depth::Shallow}) {
    Checker c(cfg(d, Eagerness::Eager), sigma());
    auto [t, core] = c.synthesise(c.empty_context(), parse_expr("/\\a -> \\x -> (x : a)"));
    t = c.zonk(t);
    ASSERT_TRUE(t->is(Type::Kind::Arrow)) << pretty(t);
    EXPECT_TRUE(t->dom()->is(Type::Kind::Meta));
    EXPECT_TRUE(alpha_equal(t->dom(), t->cod()));
  }
}

TEST(Synthesise, EagerShallowPartialPair) {
  Checker c(cfg(Depth::Shallow, Eagerness::Eager), sigma());
  auto alpha = c.fresh_meta();
  auto ctx = with_prelude(c).with_term("x", alpha);
  auto [t, core] = c.synthesise(ctx, parse_expr("pair x"));
  t = c.zonk(t);
  ASSERT_TRUE(t->is(Type::Kind::Arrow)) << pretty(t);
  auto beta = t->dom();
  EXPECT_TRUE(beta->is(Type::Kind::Meta));
  EXPECT_TRUE(alpha_equal(t->cod(), tpair(c.zonk(alpha), beta))) << pretty(t) << " with x : " << pretty(c.zonk(alpha));
}

TEST(Check, SpecifiedTyLamAgainstInferredBinder) {
  for (auto f : FlavourConfig::all()) {
    Checker c(f, sigma());
    EXPECT_THROW(c.check(c.empty_context(), parse_expr("/\\a -> \\x -> (x : a)"), parse_type("forall {a}. a -> a")),
                 TypeError)
        << f.name();
  }
}

TEST(Check, NoSkolemisationPastArrow) {
  for (auto f : FlavourConfig::all()) {
    Checker c(f, sigma());
    EXPECT_NO_THROW(c.check(c.empty_context(), parse_expr("\\x -> /\\b -> \\y -> (y : b)"),
                            parse_type("forall a. a -> forall b. b -> b")))
        << f.name();
  }
}

TEST(Check, UndefinedAtNestedForall) {
  auto t = parse_type("Int -> forall a. a -> a");
  for (auto f : FlavourConfig::all()) {
    Checker c(f, sigma());
    auto run = [&] { c.check(c.empty_context(), parse_expr("undefined"), t); };
    if (f.deep())
      EXPECT_NO_THROW(run()) << f.name();
    else
      EXPECT_EQ(error_of(run), ErrorKind::ImpredicativeInstantiation) << f.name();
  }
}

TEST(SynthesiseHead, Examples) {
  Checker c(FlavourConfig{}, sigma());
  auto ctx = with_prelude(c);
  EXPECT_TRUE(alpha_equal(c.synthesise_head(ctx, hvar("id")).first, parse_type("forall a. a -> a")));
  auto ann = c.synthesise_head(ctx, hann(parse_expr("\\x -> x"), parse_type("forall a. a -> a"))).first;
  EXPECT_TRUE(alpha_equal(ann, parse_type("forall a. a -> a")));
  EXPECT_TRUE(alpha_equal(c.synthesise_head(ctx, hseq()).first, parse_type("forall a b. a -> b -> b")));
  EXPECT_TRUE(alpha_equal(c.synthesise_head(ctx, hundefined()).first, parse_type("forall a. a")));
  EXPECT_EQ(error_of([&] { c.synthesise_head(ctx, hvar("nope")); }), ErrorKind::UnboundVariable);
  EXPECT_EQ(error_of([&] { c.synthesise_head(ctx, hcon("Nope")); }), ErrorKind::UnboundConstructor);
}

TEST(CheckArgs, Examples) {
  Checker c(FlavourConfig{}, sigma());
  auto ctx = with_prelude(c);
  auto [t, core] = c.check_args(ctx, {type_arg(tint()), type_arg(tbool())}, parse_type("forall a b. a -> b -> a"),
                                cvar("const"));
  EXPECT_TRUE(alpha_equal(c.zonk(t), parse_type("Int -> Bool -> Int")));
  EXPECT_EQ(error_of([&] { c.check_args(ctx, {type_arg(tint())}, parse_type("forall {a}. a -> a"), cvar("id2")); }),
            ErrorKind::TypeApplicationError);
  auto sigma0 = parse_type("forall a. a -> forall b. b -> (a, b)");
  auto [t0, core0] = c.check_args(ctx, {}, sigma0, cvar("pair"));
  EXPECT_TRUE(alpha_equal(t0, sigma0));
  EXPECT_EQ(error_of([&] {
              c.check_args(ctx, {term_arg(parse_expr("1")), term_arg(parse_expr("2"))}, tarrow(tint(), tint()),
                           cvar("f"));
            }),
            ErrorKind::TooManyArguments);
}

TEST(PatternsSynth, Examples) {
  Checker c(FlavourConfig{}, sigma());
  auto ctx = c.empty_context();

  auto r1 = c.check_patterns_synth(ctx, pats_of("f x = x"));
  ASSERT_EQ(r1.descriptors.size(), 1u);
  EXPECT_FALSE(r1.descriptors[0].is_type);
  EXPECT_TRUE(r1.descriptors[0].type->is(Type::Kind::Meta));
  ASSERT_NE(r1.ctx.lookup_term("x"), nullptr);

  auto r2 = c.check_patterns_synth(ctx, pats_of("f @a (x :: a) = x"));
  ASSERT_EQ(r2.descriptors.size(), 2u);
  ASSERT_TRUE(r2.descriptors[0].is_type);
  EXPECT_TRUE(alpha_equal(c.zonk(r2.descriptors[1].type), tvar(r2.descriptors[0].tyvar)));
  EXPECT_TRUE(r2.ctx.has_tyvar(r2.descriptors[0].tyvar));
  EXPECT_TRUE(alpha_equal(assemble_type(r2.descriptors, c.zonk(r2.descriptors[1].type)),
                          parse_type("forall a. a -> a")));

  auto r3 = c.check_patterns_synth(ctx, pats_of("f (Just @Int x) = x"));
  ASSERT_NE(r3.ctx.lookup_term("x"), nullptr);
  EXPECT_TRUE(alpha_equal(c.zonk(r3.ctx.lookup_term("x")->type), tint()));

  EXPECT_EQ(error_of([&] { c.check_patterns_synth(ctx, pats_of("f (Just x y) = x")); }), ErrorKind::ArityMismatch);
  EXPECT_EQ(error_of([&] { c.check_patterns_synth(ctx, pats_of("f (Nope x) = x")); }),
            ErrorKind::UnboundConstructor);
}

TEST(PatternsCheck, Examples) {
  Checker c(FlavourConfig{}, sigma());
  auto ctx = c.empty_context();

  auto r1 = c.check_patterns_check(ctx, pats_of("f @a x = x"), parse_type("forall a. a -> a"));
  ASSERT_TRUE(r1.residual->is(Type::Kind::Var));
  EXPECT_TRUE(r1.ctx.has_tyvar(r1.residual->name));
  EXPECT_TRUE(alpha_equal(r1.ctx.lookup_term("x")->type, r1.residual));

  auto scheme = parse_type("forall a. a -> a");
  auto r2 = c.check_patterns_check(ctx, {}, scheme);
  EXPECT_TRUE(alpha_equal(r2.residual, scheme));

  auto r3 = c.check_patterns_check(ctx, pats_of("f () = x"), parse_type("() -> forall a. a -> a"));
  EXPECT_TRUE(alpha_equal(r3.residual, scheme));

  EXPECT_EQ(error_of([&] { c.check_patterns_check(ctx, pats_of("f @a x = x"), parse_type("forall {a}. a -> a")); }),
            ErrorKind::SpecificityMismatch);
}

TEST(AssembleType, Examples) {
  auto sigma0 = parse_type("forall b. b");
  EXPECT_TRUE(alpha_equal(assemble_type({}, sigma0), sigma0));
  PatDescriptor ta{true, "a", nullptr}, a{false, "", tvar("a")};
  EXPECT_TRUE(alpha_equal(assemble_type({ta, a}, tvar("a")), parse_type("forall a. a -> a")));
  PatDescriptor i{false, "", tint()}, b{false, "", tbool()};
  EXPECT_TRUE(alpha_equal(assemble_type({i, b}, tunit()), parse_type("Int -> Bool -> ()")));
}

TEST(Generalise, MonotypeUnchanged) {
  Checker c(FlavourConfig{}, sigma());
  auto [t, names] = c.generalise(parse_type("Int -> Int"));
  EXPECT_TRUE(alpha_equal(t, parse_type("Int -> Int")));
  EXPECT_TRUE(names.empty());
}

TEST(Decl, GeneralisationExamples) {
  auto es = flavour("eager-shallow"), ls = flavour("lazy-shallow");
  EXPECT_EQ(inferred(parse_program("f x = x"), "f", es), "forall {a}. a -> a");
  EXPECT_EQ(inferred(corpus("myPair.mplc"), "myPair", es), "forall {a}. a -> forall b. b -> (a, b)");
  auto unit = corpus("unitId.mplc");
  EXPECT_EQ(inferred(unit, "unitId1", ls), "() -> forall a. a -> a");
  EXPECT_EQ(inferred(unit, "unitId2", ls), "forall {a}. () -> a -> a");
  EXPECT_EQ(inferred(unit, "unitId1", es), "forall {a}. () -> a -> a");
}

TEST(Decl, Errors) {
  auto ls = flavour("lazy-shallow");
  auto expect_kind = [&](const std::string& src, ErrorKind k) {
    EXPECT_EQ(error_of([&] { check_program(parse_program(src), ls); }), k) << src;
  };
  expect_kind("f True = 1\nf False = True", ErrorKind::EquationTypeMismatch);
  expect_kind("f x = y", ErrorKind::UnboundVariable);
  expect_kind("f = undefined @b", ErrorKind::UnboundTypeVariable);
  expect_kind("f : forall a. a -> b\nf x = x", ErrorKind::ConstructorMismatch);
  expect_kind("f : Foo\nf = undefined", ErrorKind::UnknownTypeConstructor);
  expect_kind("f x = x x", ErrorKind::OccursCheck);
  expect_kind("f = 1 2", ErrorKind::TooManyArguments);
  expect_kind("f : forall a. a -> a\nf x = 1", ErrorKind::ConstructorMismatch);
  EXPECT_THROW(parse_program("f x y = x\nf x = x"), ParseError);
}

TEST(Decl, SkolemEscape) {
  EXPECT_EQ(error_of([] {
              check_program(parse_program("g : (forall a. a -> a) -> Int\ng f = 1\nh = \\y -> g (\\x -> y)"),
                            flavour("lazy-shallow"));
            }),
            ErrorKind::SkolemEscape);
}

// ---------------------------------------------------------------- properties

TEST(TypecheckProperty, EagerOutputShape) {
  int checked = 0;
  for (uint64_t seed = 0; seed < 150; ++seed) {
    auto p = generate_program(seed, 6);
    if (!p.main) continue;
    for (auto d : {Depth::Deep, Depth::Shallow}) {
      Checker c(cfg(d, Eagerness::Eager), sigma());
      auto ctx = c.empty_context();
      try {
        for (auto& decl : p.decls) ctx = c.check_decl(ctx, decl).ctx;
        auto [t, core] = c.synthesise(ctx, p.main);
        t = c.zonk(t);
        EXPECT_TRUE(binders(d, t).vars.empty()) << pretty(t);
        EXPECT_TRUE(is_instantiated(t, d == Depth::Deep)) << pretty(t);
        ++checked;
      } catch (const TypeError&) {
      }
    }
  }
  EXPECT_GT(checked, 200);
}

TEST(TypecheckProperty, DeepInstantiationReachesCodomains) {
  mplc::test::TypeGen gen(21);
  for (int i = 0; i < 300; ++i) {
    Checker c(cfg(Depth::Deep, Eagerness::Lazy), sigma());
    auto r = c.instantiate(gen(5));
    EXPECT_TRUE(is_instantiated(c.zonk(r.residual), true)) << pretty(r.residual);
  }
}

TEST(TypecheckProperty, InstantiateThenGeneraliseFlipsSpecificity) {
  mplc::test::TypeGen gen(22);
  int checked = 0;
  for (int i = 0; checked < 200 && i < 5000; ++i) {
    auto body = gen(4);
    if (!is_monotype(body)) continue;
    auto fv = free_type_vars(body);
    if (fv.empty()) continue;
    std::vector<std::pair<std::string, Specificity>> spec, inf;
    for (auto& v : fv) {
      spec.push_back({v, S});
      inf.push_back({v, I});
    }
    auto scheme = tforalls(spec, body);
    auto src = "f : " + pretty(scheme) + "\nf = undefined\ng = f";
    for (auto d : {Depth::Deep, Depth::Shallow}) {
      auto r = check_program(parse_program(src), FlavourConfig{d, Eagerness::Eager});
      EXPECT_TRUE(alpha_equal(r.find("g")->type, tforalls(inf, body))) << src;
    }
    ++checked;
  }
  EXPECT_EQ(checked, 200);
}

TEST(TypecheckProperty, AssembleInvertsDecomposition) {
  mplc::test::TypeGen gen(23);
  for (int i = 0; i < 300; ++i) {
    auto t = gen(5);
    // peel specified binders and monotype domains into descriptors
    std::vector<PatDescriptor> ds;
    auto cur = t;
    while (true) {
      if (cur->is(Type::Kind::Forall) && cur->spec == S) {
        ds.push_back({true, cur->name, nullptr});
        cur = cur->body();
      } else if (cur->is(Type::Kind::Arrow) && is_monotype(cur->dom())) {
        ds.push_back({false, "", cur->dom()});
        cur = cur->cod();
      } else {
        break;
      }
    }
    EXPECT_TRUE(alpha_equal(assemble_type(ds, cur), t)) << pretty(t);
  }
}

TEST(TypecheckProperty, Deterministic) {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    auto p = generate_program(seed, 6);
    for (auto f : FlavourConfig::all()) {
      auto r1 = check_program(p, f), r2 = check_program(p, f);
      ASSERT_EQ(r1.decls.size(), r2.decls.size());
      for (size_t i = 0; i < r1.decls.size(); ++i) {
        EXPECT_EQ(pretty(r1.decls[i].type), pretty(r2.decls[i].type));
        EXPECT_EQ(pretty(r1.decls[i].core), pretty(r2.decls[i].core));
      }
    }
  }
}

TEST(TypecheckProperty, ElaborationPreservationOnCorpus) {
  for (auto& ent : std::filesystem::directory_iterator(MPLC_CORPUS_DIR)) {
    auto p = parse_program(mplc::test::slurp(ent.path().string()));
    for (auto f : FlavourConfig::all()) {
      ProgramResult r;
      try {
        r = check_program(p, f);
      } catch (const TypeError&) {
        continue;
      }
      for (size_t i = 0; i < r.decls.size(); ++i) {
        auto t = core_typecheck(TypingContext(r.sigma), r.closed_decl(i));
        EXPECT_TRUE(core_type_equal(t, r.decls[i].type)) << ent.path() << " " << f.name() << " " << r.decls[i].name;
      }
      if (r.main_core) {
        EXPECT_TRUE(core_type_equal(core_typecheck(TypingContext(r.sigma), r.closed_main()), r.main_type));
      }
    }
  }
}
