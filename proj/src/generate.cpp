#include <functional>
#include <random>

#include "mplc/parser.hpp"
#include "mplc/stability.hpp"

namespace mplc {

namespace {

const char* kPrelude = R"(
id : forall a. a -> a
id x = x

const : forall a b. a -> b -> a
const x y = x

pair : forall a. a -> forall b. b -> (a, b)
pair x y = (x, y)

apply : forall a b. (a -> b) -> a -> b
apply f x = f x

fst : forall a b. (a, b) -> a
fst (x, y) = x

choose : forall a. Bool -> a -> a -> a
choose True x y = x
choose False x y = y
)";

const Program& prelude() {
  static const Program p = parse_program(kPrelude);
  return p;
}

struct Local {
  std::string name;
  TypePtr type;
};

using Env = std::vector<Local>;

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  int pick(int n) { return static_cast<int>(gen_() % static_cast<uint64_t>(n)); }
  bool chance(int pct) { return pick(100) < pct; }

 private:
  std::mt19937_64 gen_;
};

bool same(const TypePtr& a, const TypePtr& b) { return core_type_equal(a, b); }

class ProgramGen {
 public:
  ProgramGen(uint64_t seed, int size) : rng_(seed), size_(std::max(size, 1)) {}

  Program run() {
    Program p = prelude();
    int ndecls = 1 + rng_.pick(size_);
    for (int i = 0; i < ndecls; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < 8 && !placed; ++attempt) {
        auto before = globals_.size();
        Program q = p;
        for (auto& d : decl()) q.decls.push_back(d);
        if (accepted(q)) {
          p = std::move(q);
          placed = true;
        } else {
          globals_.resize(before);
        }
      }
      if (!placed) {
        Decl d;
        d.name = fresh("d");
        d.eqs.push_back({{}, mk_app(hcon(kUnit))});
        p.decls.push_back(d);
      }
    }
    for (int attempt = 0; attempt < 8; ++attempt) {
      Program q = p;
      q.main = gen(ground(), {}, budget());
      if (accepted(q)) return q;
    }
    p.main = mk_app(hcon(kUnit));
    return p;
  }

 private:
  Rng rng_;
  int size_;
  int names_ = 0;
  Env globals_;

  int budget() { return 1 + rng_.pick(size_ > 1 ? size_ - 1 : 1) / 2 + 1; }

  static bool accepted(const Program& p) {
    try {
      check_program(p, FlavourConfig{});
      return true;
    } catch (const std::exception&) {
      return false;
    }
  }

  std::string fresh(const std::string& base) { return base + std::to_string(++names_); }

  TypePtr base_type() {
    switch (rng_.pick(3)) {
      case 0:
        return tint();
      case 1:
        return tbool();
      default:
        return tunit();
    }
  }

  TypePtr ground() { return rng_.chance(80) ? base_type() : tpair(base_type(), base_type()); }

  TypePtr type(int depth) {
    int r = rng_.pick(100);
    if (depth <= 0 || r < 50) return base_type();
    if (r < 65) return tpair(type(depth - 1), type(depth - 1));
    return tarrow(type(depth - 1), type(depth - 1));
  }

  TypePtr fun_type() { return tarrow(type(1), type(1)); }

  std::vector<std::string> matching(const TypePtr& t, const Env& env) {
    std::vector<std::string> out;
    for (auto& l : env)
      if (same(l.type, t)) out.push_back(l.name);
    for (auto& g : globals_)
      if (same(g.type, t)) out.push_back(g.name);
    return out;
  }

  ExprPtr leaf(const TypePtr& t, const Env& env) {
    auto vars = matching(t, env);
    if (!vars.empty() && rng_.chance(50)) return mk_var(vars[rng_.pick(static_cast<int>(vars.size()))]);
    switch (t->kind) {
      case Type::Kind::Con:
        if (t->name == "Int") return mk_app(hlit(rng_.pick(10)));
        if (t->name == "Bool") return mk_app(hcon(rng_.chance(50) ? "True" : "False"));
        if (t->name == kPair) return mk_app(hcon(kPair), {term_arg(leaf(t->args[0], env)), term_arg(leaf(t->args[1], env))});
        return mk_app(hcon(kUnit));
      case Type::Kind::Arrow: {
        if (same(t->dom(), t->cod()) && rng_.chance(30)) return mk_var("id");
        auto x = fresh("x");
        Env inner = env;
        inner.push_back({x, t->dom()});
        return mk_lam(x, leaf(t->cod(), inner));
      }
      default:
        return mk_app(hundefined());
    }
  }

  ExprPtr gen(const TypePtr& t, const Env& env, int budget) {
    if (budget <= 0) return leaf(t, env);
    int b = budget - 1;
    std::vector<std::function<ExprPtr()>> opts;
    auto add = [&](int weight, std::function<ExprPtr()> f) {
      for (int i = 0; i < weight; ++i) opts.push_back(f);
    };
    add(3, [&] { return leaf(t, env); });
    add(1, [&] {
      if (rng_.chance(50)) return mk_app(hvar("id"), {term_arg(gen(t, env, b))});
      return mk_app(hvar("id"), {type_arg(t), term_arg(gen(t, env, b))});
    });
    add(1, [&] {
      auto s = base_type();
      if (rng_.chance(30))
        return mk_app(hvar("const"), {type_arg(t), type_arg(s), term_arg(gen(t, env, b)), term_arg(gen(s, env, b))});
      return mk_app(hvar("const"), {term_arg(gen(t, env, b)), term_arg(gen(s, env, b))});
    });
    add(1, [&] {
      auto s = base_type();
      return mk_app(hvar("apply"), {term_arg(gen(tarrow(s, t), env, b)), term_arg(gen(s, env, b))});
    });
    add(1, [&] {
      auto s = base_type();
      return mk_app(hvar("fst"), {term_arg(gen(tpair(t, s), env, b))});
    });
    add(1, [&] {
      return mk_app(hvar("choose"),
                    {term_arg(gen(tbool(), env, b)), term_arg(gen(t, env, b)), term_arg(gen(t, env, b))});
    });
    add(1, [&] {
      auto s = type(1);
      return mk_app(hseq(), {term_arg(gen(s, env, b)), term_arg(gen(t, env, b))});
    });
    add(1, [&] { return mk_app(hann(gen(t, env, b), t)); });
    add(1, [&] {
      auto s = type(1);
      Decl d;
      d.name = fresh("y");
      d.strict = rng_.chance(10);
      d.eqs.push_back({{}, gen(s, env, b)});
      Env inner = env;
      inner.push_back({d.name, s});
      return mk_let(d, gen(t, inner, b));
    });
    for (auto& l : env)
      if (l.type->kind == Type::Kind::Arrow && same(l.type->cod(), t)) {
        auto fl = l;
        add(2, [&, fl] { return mk_app(hvar(fl.name), {term_arg(gen(fl.type->dom(), env, b))}); });
      }
    for (auto& g : globals_)
      if (g.type->kind == Type::Kind::Arrow && same(g.type->cod(), t)) {
        auto fg = g;
        add(1, [&, fg] { return mk_app(hvar(fg.name), {term_arg(gen(fg.type->dom(), env, b))}); });
      }
    if (t->kind == Type::Kind::Con && t->name == kPair) {
      add(2, [&] {
        return mk_app(hcon(kPair), {term_arg(gen(t->args[0], env, b)), term_arg(gen(t->args[1], env, b))});
      });
      add(1, [&] {
        if (rng_.chance(50))
          return mk_app(hvar("pair"), {term_arg(gen(t->args[0], env, b)), term_arg(gen(t->args[1], env, b))});
        return mk_app(hvar("pair"), {type_arg(t->args[0]), term_arg(gen(t->args[0], env, b)), type_arg(t->args[1]),
                                     term_arg(gen(t->args[1], env, b))});
      });
    }
    if (t->kind == Type::Kind::Arrow) {
      add(3, [&] {
        auto x = fresh("x");
        Env inner = env;
        inner.push_back({x, t->dom()});
        return mk_lam(x, gen(t->cod(), inner, b));
      });
      add(1, [&] { return mk_app(hvar("const"), {term_arg(gen(t->cod(), env, b))}); });
      add(1, [&] { return mk_app(hvar("apply"), {term_arg(gen(t, env, b))}); });
      auto cod = t->cod();
      if (cod->kind == Type::Kind::Con && cod->name == kPair && same(cod->args[1], t->dom()))
        add(1, [&] { return mk_app(hvar("pair"), {term_arg(gen(cod->args[0], env, b))}); });
    }
    if (rng_.chance(3)) return mk_app(hundefined());
    return opts[rng_.pick(static_cast<int>(opts.size()))]();
  }

  Decl plain(const std::string& name) {
    Decl d;
    d.name = name;
    TypePtr t = rng_.chance(50) ? fun_type() : type(2);
    if (rng_.chance(12)) {
      static const char* aliases[] = {"id", "const", "pair", "apply", "choose", "fst"};
      d.eqs.push_back({{}, mk_var(aliases[rng_.pick(6)])});
      return d;
    }
    d.eqs.push_back({{}, gen(t, {}, budget())});
    globals_.push_back({name, t});
    return d;
  }

  Decl with_patterns(const std::string& name) {
    Decl d;
    d.name = name;
    int n = 1 + rng_.pick(2);
    Env env;
    std::vector<Pattern> ps;
    TypePtr res = type(1);
    TypePtr whole = res;
    std::vector<TypePtr> doms;
    for (int i = 0; i < n; ++i) doms.push_back(type(1));
    for (auto it = doms.rbegin(); it != doms.rend(); ++it) whole = tarrow(*it, whole);
    for (auto& dt : doms) {
      Pattern p;
      p.name = fresh("x");
      if (rng_.chance(15)) p.ann = dt;
      env.push_back({p.name, dt});
      ps.push_back(p);
    }
    d.eqs.push_back({ps, gen(res, env, budget())});
    globals_.push_back({name, whole});
    return d;
  }

  Decl multi(const std::string& name) {
    Decl d;
    d.name = name;
    TypePtr t = type(1);
    for (const char* k : {"True", "False"}) {
      Pattern p;
      p.kind = Pattern::Kind::Con;
      p.name = k;
      d.eqs.push_back({{p}, gen(t, {}, budget())});
    }
    globals_.push_back({name, tarrow(tbool(), t)});
    return d;
  }

  Decl unit_pattern(const std::string& name) {
    Decl d;
    d.name = name;
    Pattern p;
    p.kind = Pattern::Kind::Con;
    p.name = kUnit;
    static const char* poly[] = {"id", "pair", "const"};
    ExprPtr rhs;
    if (rng_.chance(50)) {
      rhs = mk_var(poly[rng_.pick(3)]);
    } else {
      TypePtr t = type(1);
      rhs = gen(t, {}, budget());
      globals_.push_back({name, tarrow(tunit(), t)});
    }
    d.eqs.push_back({{p}, rhs});
    if (rng_.chance(25)) d.eqs.push_back(d.eqs[0]);
    return d;
  }

  Decl tyvar_pattern(const std::string& name) {
    Decl d;
    d.name = name;
    Pattern a;
    a.kind = Pattern::Kind::TyVar;
    a.name = "a";
    Pattern x;
    x.name = fresh("x");
    if (rng_.chance(50)) {
      x.ann = tvar("a");
      d.eqs.push_back({{a, x}, mk_var(x.name)});
    } else {
      d.eqs.push_back({{a, x}, mk_app(hann(mk_var(x.name), tvar("a")))});
    }
    return d;
  }

  Decl tylam(const std::string& name) {
    Decl d;
    d.name = name;
    auto x = fresh("x");
    ExprPtr body = mk_lam(x, mk_app(hann(mk_var(x), tvar("a"))));
    d.eqs.push_back({{}, mk_tylam("a", body)});
    return d;
  }

  Decl mono_sig(const std::string& name) {
    Decl d = rng_.chance(50) ? plain(name) : with_patterns(name);
    if (!globals_.empty() && globals_.back().name == name) d.sig = globals_.back().type;
    return d;
  }

  Decl poly_sig(const std::string& name) {
    static const char* templates[] = {
        "f : forall a. Int -> a -> a\nf n x = x\n",
        "f : forall a. Int -> a -> a\nf = undefined\n",
        "f : Int -> forall a. a -> a\nf n = id\n",
        "f : (forall a. a -> a) -> Int\nf g = g 1\n",
        "f : forall a. a -> a\nf = \\x -> x\n",
        "f : forall a. a -> forall b. b -> a\nf x y = x\n",
    };
    Decl d = parse_program(templates[rng_.pick(6)]).decls.at(0);
    d.name = name;
    return d;
  }

  std::vector<Decl> decl() {
    std::string name = fresh("d");
    int r = rng_.pick(100);
    if (r < 40) return {plain(name)};
    if (r < 55) return {with_patterns(name)};
    if (r < 63) return {multi(name)};
    if (r < 70) return {unit_pattern(name)};
    if (r < 76) return {tyvar_pattern(name)};
    if (r < 81) return {tylam(name)};
    if (r < 92) return {mono_sig(name)};
    return {poly_sig(name)};
  }
};

// ---------------------------------------------------------------- core terms

class CoreGen {
 public:
  CoreGen(uint64_t seed, int size) : rng_(seed), size_(std::max(size, 1)) {}

  GeneratedCore run() {
    TypePtr t = type(2);
    return {gen(t, {}, size_), t};
  }

 private:
  Rng rng_;
  int size_;
  int names_ = 0;

  std::string fresh(const std::string& base) { return base + "_" + std::to_string(++names_); }

  TypePtr base_type() {
    switch (rng_.pick(3)) {
      case 0:
        return tint();
      case 1:
        return tbool();
      default:
        return tunit();
    }
  }

  TypePtr poly_id() {
    auto a = fresh("a");
    return tforall(a, Specificity::Specified, tarrow(tvar(a), tvar(a)));
  }

  TypePtr type(int depth) {
    int r = rng_.pick(100);
    if (depth <= 0 || r < 45) return base_type();
    if (r < 60) return tpair(type(depth - 1), type(depth - 1));
    if (r < 90) return tarrow(type(depth - 1), type(depth - 1));
    return poly_id();
  }

  CorePtr var_of(const TypePtr& t, const Env& env) {
    std::vector<std::string> vs;
    for (auto& l : env)
      if (same(l.type, t)) vs.push_back(l.name);
    if (vs.empty()) return nullptr;
    return cvar(vs[rng_.pick(static_cast<int>(vs.size()))]);
  }

  CorePtr leaf(const TypePtr& t, const Env& env) {
    if (auto v = var_of(t, env); v && rng_.chance(60)) return v;
    switch (t->kind) {
      case Type::Kind::Con:
        if (t->name == "Int") return clit(rng_.pick(10));
        if (t->name == "Bool") return ccon(rng_.chance(50) ? "True" : "False");
        if (t->name == kPair)
          return capp(capp(ctyapp(ctyapp(ccon(kPair), t->args[0]), t->args[1]), leaf(t->args[0], env)),
                      leaf(t->args[1], env));
        return ccon(kUnit);
      case Type::Kind::Arrow: {
        auto x = fresh("x");
        Env inner = env;
        inner.push_back({x, t->dom()});
        return clam(x, t->dom(), leaf(t->cod(), inner));
      }
      case Type::Kind::Forall: {
        auto a = fresh("a");
        auto body = substitute_type({{t->name, tvar(a)}}, t->body());
        return ctylam(a, leaf(body, env));
      }
      default:
        if (auto v = var_of(t, env)) return v;
        return cundefined(t);
    }
  }

  CorePtr gen(const TypePtr& t, const Env& env, int budget) {
    if (budget <= 0) return leaf(t, env);
    int b = budget - 1;
    std::vector<std::function<CorePtr()>> opts;
    auto add = [&](int w, std::function<CorePtr()> f) {
      for (int i = 0; i < w; ++i) opts.push_back(f);
    };
    add(2, [&] { return leaf(t, env); });
    add(2, [&] {
      auto s = type(1);
      auto x = fresh("x");
      Env inner = env;
      inner.push_back({x, s});
      return capp(clam(x, s, gen(t, inner, b)), gen(s, env, b));
    });
    add(1, [&] {
      auto a = fresh("a");
      auto x = fresh("x");
      return capp(ctyapp(ctylam(a, clam(x, tvar(a), cvar(x))), t), gen(t, env, b));
    });
    add(1, [&] {
      auto s = type(1);
      return capp(capp(ctyapp(ctyapp(cseq(), s), t), gen(s, env, b)), gen(t, env, b));
    });
    add(1, [&] {
      std::vector<CoreAlt> alts;
      for (const char* k : {"True", "False"}) {
        CorePattern p;
        p.kind = CorePattern::Kind::Con;
        p.name = k;
        alts.push_back({{p}, gen(t, env, b)});
      }
      if (rng_.chance(30)) alts.pop_back();
      return capp(ccaselam({CoreParam{false, {}, tbool()}}, t, alts), gen(tbool(), env, b));
    });
    add(1, [&] {
      auto s1 = base_type(), s2 = base_type();
      CorePattern p;
      p.kind = CorePattern::Kind::Con;
      p.name = kPair;
      p.type_args = {s1, s2};
      CorePattern px, py;
      px.name = fresh("x");
      py.name = fresh("y");
      p.args = {px, py};
      Env inner = env;
      inner.push_back({px.name, s1});
      inner.push_back({py.name, s2});
      return capp(ccaselam({CoreParam{false, {}, tpair(s1, s2)}}, t, {CoreAlt{{p}, gen(t, inner, b)}}),
                  gen(tpair(s1, s2), env, b));
    });
    add(1, [&] {
      auto a = fresh("a");
      CorePattern px;
      px.name = fresh("x");
      auto f = ccaselam({CoreParam{true, a, nullptr}, CoreParam{false, {}, tvar(a)}}, tvar(a),
                        {CoreAlt{{px}, cvar(px.name)}});
      return capp(ctyapp(f, t), gen(t, env, b));
    });
    for (auto& l : env)
      if (l.type->kind == Type::Kind::Arrow && same(l.type->cod(), t)) {
        auto fl = l;
        add(2, [&, fl] { return capp(cvar(fl.name), gen(fl.type->dom(), env, b)); });
      }
    if (t->kind == Type::Kind::Arrow)
      add(3, [&] {
        auto x = fresh("x");
        Env inner = env;
        inner.push_back({x, t->dom()});
        return clam(x, t->dom(), gen(t->cod(), inner, b));
      });
    if (t->kind == Type::Kind::Forall)
      add(3, [&] {
        auto a = fresh("a");
        return ctylam(a, gen(substitute_type({{t->name, tvar(a)}}, t->body()), env, b));
      });
    if (rng_.chance(3)) return cundefined(t);
    return opts[rng_.pick(static_cast<int>(opts.size()))]();
  }
};

}  // namespace

Program generate_program(uint64_t seed, int size_bound) { return ProgramGen(seed, size_bound).run(); }

GeneratedCore generate_core(uint64_t seed, int size_bound) { return CoreGen(seed, size_bound).run(); }

}  // namespace mplc
