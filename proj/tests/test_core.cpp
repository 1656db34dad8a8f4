#include <gtest/gtest.h>

#include <map>

#include "mplc/stability.hpp"
#include "support.hpp"

using namespace mplc;

namespace {

const StaticContext& builtin() {
  static const StaticContext s = StaticContext::builtin();
  return s;
}

TypingContext empty_ctx() { return TypingContext(std::make_shared<const StaticContext>(builtin())); }

CorePtr poly_id() { return ctylam("a", clam("x", tvar("a"), cvar("x"))); }

CorePtr unit_value() { return ccon("()"); }

// seq @t1 @t2 e1 e2
CorePtr seq(const TypePtr& t1, const TypePtr& t2, CorePtr e1, CorePtr e2) {
  return capp(capp(ctyapp(ctyapp(cseq(), t1), t2), std::move(e1)), std::move(e2));
}

using Kind = EvalOutcome::Kind;

}  // namespace

TEST(CoreTypecheck, Examples) {
  EXPECT_TRUE(core_type_equal(core_typecheck(empty_ctx(), poly_id()), parse_type("forall a. a -> a")));
  EXPECT_TRUE(core_type_equal(core_typecheck(empty_ctx(), ctyapp(poly_id(), tint())), parse_type("Int -> Int")));
  EXPECT_THROW(core_typecheck(empty_ctx(), capp(clam("x", tint(), cvar("x")), ccon("True"))), CoreTypeError);
  EXPECT_THROW(core_typecheck(empty_ctx(), cvar("free")), CoreTypeError);
  auto u = parse_type("Int -> forall a. a -> a");
  EXPECT_TRUE(core_type_equal(core_typecheck(empty_ctx(), cundefined(u)), u));
  EXPECT_TRUE(core_type_equal(core_typecheck(empty_ctx(), cseq()), parse_type("forall a b. a -> b -> b")));
}

TEST(Step, Beta) {
  auto r = step(capp(clam("x", tint(), cvar("x")), clit(5)), builtin());
  ASSERT_EQ(r.kind, StepResult::Kind::Stepped);
  EXPECT_TRUE(core_equal(r.next, clit(5)));
  EXPECT_EQ(step(clit(5), builtin()).kind, StepResult::Kind::Value);
}

TEST(Step, CaseLamFirstFit) {
  // \case { True -> 1; _ -> 2 } applied to False
  std::vector<CoreParam> ps{{false, "", tbool()}};
  CorePattern t{CorePattern::Kind::Con, "True", {}, {}};
  CorePattern any{CorePattern::Kind::Var, "y", {}, {}};
  auto f = ccaselam(ps, tint(), {{{t}, clit(1)}, {{any}, clit(2)}});
  auto out = evaluate(capp(f, ccon("False")), 100, builtin());
  ASSERT_EQ(out.kind, Kind::Value);
  EXPECT_TRUE(core_equal(out.value, clit(2)));
}

TEST(Evaluate, Examples) {
  auto id_unit = capp(ctyapp(poly_id(), tunit()), unit_value());
  auto v = evaluate(id_unit, 100, builtin());
  ASSERT_EQ(v.kind, Kind::Value);
  EXPECT_EQ(describe_value(v.value, 100, builtin()), "()");

  auto bot = evaluate(cundefined(tint()), 100, builtin());
  EXPECT_EQ(bot.kind, Kind::FuelExhausted);
  EXPECT_EQ(bot.steps, 100);

  auto forced = evaluate(seq(tint(), tunit(), cundefined(tint()), unit_value()), 100, builtin());
  EXPECT_EQ(forced.kind, Kind::FuelExhausted);
}

TEST(Evaluate, SwizzleIsAFunction) {
  auto p = mplc::test::corpus("swizzle.mplc");
  for (auto f : {mplc::test::flavour("eager-deep"), mplc::test::flavour("lazy-deep")}) {
    auto r = check_program(p, f);
    const DeclResult* sw = r.find("swizzle");
    ASSERT_NE(sw, nullptr);
    size_t idx = sw - r.decls.data();
    auto e = seq(sw->type, tunit(), r.closed_decl(idx), unit_value());
    auto out = evaluate(e, kDefaultFuel, *r.sigma);
    EXPECT_EQ(out.kind, Kind::Value) << f.name();

    auto undef = r.find("undef");
    size_t uidx = undef - r.decls.data();
    auto out2 = evaluate(seq(undef->type, tunit(), r.closed_decl(uidx), unit_value()), kDefaultFuel, *r.sigma);
    EXPECT_EQ(out2.kind, Kind::FuelExhausted) << f.name();
  }
}

TEST(Evaluate, DivergeTables) {
  for (auto f : FlavourConfig::all()) {
    auto r1 = check_program(mplc::test::corpus("diverge.mplc"), f);
    auto o1 = evaluate(r1.closed_main(), kDefaultFuel, *r1.sigma);
    EXPECT_EQ(o1.kind, f.eager() ? Kind::FuelExhausted : Kind::Value) << f.name();
    auto r2 = check_program(mplc::test::corpus("diverge2.mplc"), f);
    EXPECT_EQ(evaluate(r2.closed_main(), kDefaultFuel, *r2.sigma).kind, Kind::FuelExhausted) << f.name();
  }
}

TEST(ApplyWrapper, Examples) {
  auto e = poly_id();
  EXPECT_TRUE(core_equal(apply_wrapper(w_identity(), e), e));
  EXPECT_TRUE(core_equal(apply_wrapper(w_apply_type(tint()), e), ctyapp(e, tint())));

  auto fun = tarrow(tint(), tint());
  auto eta = apply_wrapper(w_eta(tint(), w_identity()), cundefined(fun));
  ASSERT_EQ(eta->kind, CoreExpr::Kind::Lam);
  ASSERT_EQ(eta->a->kind, CoreExpr::Kind::App);
  EXPECT_TRUE(core_equal(eta->a->a, cundefined(fun)));
  EXPECT_TRUE(core_equal(eta->a->b, cvar(eta->name)));
  EXPECT_TRUE(core_type_equal(core_typecheck(empty_ctx(), eta), fun));
  EXPECT_EQ(evaluate(seq(fun, tunit(), eta, unit_value()), 100, builtin()).kind, Kind::Value);
  EXPECT_EQ(evaluate(seq(fun, tunit(), cundefined(fun), unit_value()), 100, builtin()).kind, Kind::FuelExhausted);
}

TEST(Equivalence, Examples) {
  auto fun = tarrow(tint(), tint());
  auto bot = cundefined(fun);
  auto eta = apply_wrapper(w_eta(tint(), w_identity()), bot);
  EXPECT_EQ(behaviorally_equivalent(bot, bot, fun, fun, builtin()).kind, Equivalence::Kind::Equivalent);
  EXPECT_EQ(behaviorally_equivalent(bot, eta, fun, fun, builtin()).kind, Equivalence::Kind::Distinguished);
  EXPECT_EQ(behaviorally_equivalent(poly_id(), poly_id(), parse_type("forall a. a -> a"),
                                    parse_type("forall a. a -> a"), builtin())
                .kind,
            Equivalence::Kind::Equivalent);

  auto p = mplc::test::corpus("diverge.mplc");
  auto lazy = check_program(p, mplc::test::flavour("lazy-shallow"));
  auto eager = check_program(p, mplc::test::flavour("eager-shallow"));
  auto r = behaviorally_equivalent(lazy.closed_main(), eager.closed_main(), lazy.main_type, eager.main_type,
                                   *lazy.sigma);
  EXPECT_EQ(r.kind, Equivalence::Kind::Distinguished) << r.detail;
}

// ---------------------------------------------------------------- properties

TEST(CoreProperty, GeneratedTermsTypecheck) {
  for (uint64_t seed = 0; seed < 300; ++seed) {
    auto g = generate_core(seed, 6);
    auto t = core_typecheck(empty_ctx(), g.term);
    EXPECT_TRUE(core_type_equal(t, g.type)) << pretty(g.term);
  }
}

TEST(CoreProperty, PreservationProgressDeterminism) {
  for (uint64_t seed = 0; seed < 300; ++seed) {
    auto g = generate_core(seed, 6);
    auto e = g.term;
    for (int i = 0; i < 200; ++i) {
      auto r = step(e, builtin());
      ASSERT_NE(r.kind, StepResult::Kind::Stuck) << r.why << "\n" << pretty(e);
      if (r.kind == StepResult::Kind::Value) break;
      auto again = step(e, builtin());
      ASSERT_TRUE(core_equal(r.next, again.next));
      ASSERT_TRUE(core_type_equal(core_typecheck(empty_ctx(), r.next), g.type)) << pretty(r.next);
      if (r.loops) break;
      e = r.next;
    }
  }
}

TEST(CoreProperty, TypeErasure) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    auto g = generate_core(seed, 6);
    if (!is_monotype(g.type)) continue;
    auto wrapped = apply_wrapper(w_compose(w_apply_type(tint()), w_tyabs("erased")), g.term);
    EXPECT_TRUE(core_type_equal(core_typecheck(empty_ctx(), wrapped), g.type));
    auto a = evaluate(g.term, 500, builtin()), b = evaluate(wrapped, 500, builtin());
    ASSERT_EQ(a.kind, b.kind) << pretty(g.term);
    if (a.kind == Kind::Value) {
      EXPECT_EQ(describe_value(a.value, 500, builtin()), describe_value(b.value, 500, builtin()));
    }
  }
}

TEST(CoreProperty, EquivalenceReflexiveAndSymmetric) {
  std::map<std::string, std::vector<GeneratedCore>> by_type;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    auto g = generate_core(seed, 5);
    auto r = behaviorally_equivalent(g.term, g.term, g.type, g.type, builtin());
    EXPECT_NE(r.kind, Equivalence::Kind::Distinguished) << pretty(g.term) << ": " << r.detail;
    by_type[pretty(g.type)].push_back(g);
  }
  int pairs = 0;
  for (auto& [t, gs] : by_type)
    for (size_t i = 0; i + 1 < gs.size() && i < 6; ++i) {
      auto& x = gs[i];
      auto& y = gs[i + 1];
      auto xy = behaviorally_equivalent(x.term, y.term, x.type, y.type, builtin());
      auto yx = behaviorally_equivalent(y.term, x.term, y.type, x.type, builtin());
      EXPECT_EQ(xy.kind, yx.kind) << pretty(x.term) << "\n" << pretty(y.term);
      ++pairs;
    }
  EXPECT_GT(pairs, 20);
}
