#include <functional>
#include <sstream>

#include "mplc/core.hpp"

namespace mplc {

namespace {

// Minimal first-order unifier over probe metas; binders compare positionally.
struct ProbeUnifier {
  std::vector<TypePtr> sol;

  TypePtr fresh() {
    sol.push_back(nullptr);
    return tmeta(static_cast<int>(sol.size()) - 1);
  }

  TypePtr zonk(const TypePtr& t) {
    switch (t->kind) {
      case Type::Kind::Meta:
        if (t->meta < static_cast<int>(sol.size()) && sol[t->meta]) return zonk(sol[t->meta]);
        return t;
      case Type::Kind::Var:
        return t;
      case Type::Kind::Arrow:
        return tarrow(zonk(t->dom()), zonk(t->cod()));
      case Type::Kind::Con: {
        std::vector<TypePtr> as;
        for (auto& a : t->args) as.push_back(zonk(a));
        return tcon(t->name, as);
      }
      case Type::Kind::Forall:
        return tforall(t->name, t->spec, zonk(t->body()));
    }
    return t;
  }

  bool occurs(int m, const TypePtr& t) {
    auto z = zonk(t);
    for (int x : free_metas(z))
      if (x == m) return true;
    return false;
  }

  bool unify(const TypePtr& a0, const TypePtr& b0) {
    auto a = zonk(a0), b = zonk(b0);
    if (a->kind == Type::Kind::Meta) {
      if (b->kind == Type::Kind::Meta && b->meta == a->meta) return true;
      if (occurs(a->meta, b)) return false;
      sol[a->meta] = b;
      return true;
    }
    if (b->kind == Type::Kind::Meta) return unify(b, a);
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case Type::Kind::Var:
        return a->name == b->name;
      case Type::Kind::Arrow:
        return unify(a->dom(), b->dom()) && unify(a->cod(), b->cod());
      case Type::Kind::Con:
        if (a->name != b->name || a->args.size() != b->args.size()) return false;
        for (size_t i = 0; i < a->args.size(); ++i)
          if (!unify(a->args[i], b->args[i])) return false;
        return true;
      case Type::Kind::Forall: {
        auto v = tvar(fresh_name("u"));
        return unify(substitute_type({{a->name, v}}, a->body()), substitute_type({{b->name, v}}, b->body()));
      }
      default:
        return false;
    }
  }

  // Instantiates binders at the given depth, recording one meta per binder in encounter order.
  TypePtr instantiate(const TypePtr& t, bool deep, std::vector<TypePtr>& metas) {
    TypePtr cur = t;
    while (cur->kind == Type::Kind::Forall) {
      auto m = fresh();
      metas.push_back(m);
      cur = substitute_type({{cur->name, m}}, cur->body());
    }
    if (deep && cur->kind == Type::Kind::Arrow) return tarrow(cur->dom(), instantiate(cur->cod(), deep, metas));
    return cur;
  }
};

TypePtr default_metas(const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::Meta:
      return tunit();
    case Type::Kind::Var:
      return t;
    case Type::Kind::Arrow:
      return tarrow(default_metas(t->dom()), default_metas(t->cod()));
    case Type::Kind::Con: {
      std::vector<TypePtr> as;
      for (auto& a : t->args) as.push_back(default_metas(a));
      return tcon(t->name, as);
    }
    case Type::Kind::Forall:
      return tforall(t->name, t->spec, default_metas(t->body()));
  }
  return t;
}

constexpr size_t kMaxCandidates = 4;

std::vector<CorePtr> candidates(const TypePtr& t, const StaticContext& sigma, int depth) {
  std::vector<CorePtr> out;
  if (depth > 0) {
    switch (t->kind) {
      case Type::Kind::Con:
        if (t->name == "Int") {
          out = {clit(0), clit(1)};
        } else if (auto it = sigma.cons_of.find(t->name); it != sigma.cons_of.end()) {
          for (auto& k : it->second) {
            const ConInfo* ci = sigma.con(k);
            TypeSubst s;
            for (size_t i = 0; i < ci->params.size() && i < t->args.size(); ++i) s[ci->params[i]] = t->args[i];
            CorePtr e = ccon(k);
            for (auto& a : t->args) e = ctyapp(e, a);
            bool ok = true;
            for (auto& f : ci->fields) {
              auto ft = substitute_type(s, f);
              auto sub = candidates(ft, sigma, depth - 1);
              if (sub.empty()) {
                ok = false;
                break;
              }
              e = capp(e, sub.front());
            }
            if (ok) out.push_back(e);
            if (out.size() >= 3) break;
          }
          if (t->name == kPair && !out.empty()) {
            // also vary the first component
            auto firsts = candidates(t->args[0], sigma, depth - 1);
            auto seconds = candidates(t->args[1], sigma, depth - 1);
            if (firsts.size() > 1 && !seconds.empty())
              out.push_back(capp(capp(ctyapp(ctyapp(ccon(kPair), t->args[0]), t->args[1]), firsts[1]), seconds[0]));
          }
        }
        break;
      case Type::Kind::Arrow: {
        auto x = fresh_name("p");
        auto res = candidates(t->cod(), sigma, depth - 1);
        if (!res.empty() && res.front()->kind != CoreExpr::Kind::Undefined)
          out.push_back(clam(x, t->dom(), res.front()));
        if (core_type_equal(t->dom(), t->cod())) out.push_back(clam(x, t->dom(), cvar(x)));
        break;
      }
      case Type::Kind::Forall: {
        for (auto& body : candidates(t->body(), sigma, depth - 1)) {
          if (body->kind == CoreExpr::Kind::Undefined) continue;
          out.push_back(ctylam(t->name, body));
        }
        break;
      }
      default:
        break;
    }
  }
  if (out.size() >= kMaxCandidates) out.resize(kMaxCandidates - 1);
  out.push_back(cundefined(t));
  return out;
}

struct Observation {
  enum class Kind { Value, Diverge, Stuck } kind;
  std::string shape;
  long steps = 0;

  std::string show(long fuel) const {
    switch (kind) {
      case Kind::Value:
        return "value " + shape;
      case Kind::Diverge:
        return "presumed divergent (fuel=" + std::to_string(fuel) + ")";
      case Kind::Stuck:
        return "stuck: " + shape;
    }
    return {};
  }
};

Observation observe(const CorePtr& e, const TypePtr& t, const StaticContext& sigma, long fuel) {
  auto r = evaluate(e, fuel, sigma);
  if (r.kind == EvalOutcome::Kind::FuelExhausted) return {Observation::Kind::Diverge, {}, r.steps};
  if (r.kind == EvalOutcome::Kind::Stuck) return {Observation::Kind::Stuck, r.why, r.steps};
  // functions compare by convergence only; their behaviour is probed through arguments
  TypePtr u = t;
  while (u->kind == Type::Kind::Forall) u = u->body();
  std::string shape = u->kind == Type::Kind::Arrow ? "<function>" : describe_value(r.value, fuel, sigma);
  return {Observation::Kind::Value, shape, r.steps};
}

struct Side {
  CorePtr term;
  TypePtr type;
  std::vector<TypePtr> queue;  // pending type arguments, in binder encounter order
  size_t next = 0;

  void apply_pending() {
    while (type->kind == Type::Kind::Forall) {
      TypePtr arg = next < queue.size() ? queue[next++] : tunit();
      term = ctyapp(term, arg);
      type = substitute_type({{type->name, arg}}, type->body());
    }
  }
};

struct Prober {
  const StaticContext& sigma;
  ProbeConfig cfg;
  int used = 0;
  std::optional<Equivalence> verdict;
  bool inconclusive = false;
  std::string inconclusive_detail;

  static std::string describe_args(const std::vector<CorePtr>& args) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < args.size(); ++i) os << (i ? ", " : "") << pretty(args[i]);
    os << "]";
    return os.str();
  }

  void compare(const Observation& o1, const Observation& o2, const std::vector<CorePtr>& args) {
    if (o1.kind == o2.kind && o1.shape == o2.shape) return;
    bool d1 = o1.kind == Observation::Kind::Diverge, d2 = o2.kind == Observation::Kind::Diverge;
    std::string ctx = "forcing after arguments " + describe_args(args) + ": " + o1.show(cfg.fuel) + " vs " +
                      o2.show(cfg.fuel);
    if ((d1 && !d2 && o2.steps > cfg.fuel / 2) || (d2 && !d1 && o1.steps > cfg.fuel / 2)) {
      inconclusive = true;
      inconclusive_detail = ctx + " (fuel parity suspect)";
      return;
    }
    verdict = Equivalence{Equivalence::Kind::Distinguished, ctx};
  }

  void explore(Side s1, Side s2, std::vector<CorePtr>& args) {
    if (verdict || used >= cfg.budget) return;
    s1.apply_pending();
    s2.apply_pending();
    ++used;
    auto o1 = observe(s1.term, s1.type, sigma, cfg.fuel);
    auto o2 = observe(s2.term, s2.type, sigma, cfg.fuel);
    compare(o1, o2, args);
    if (verdict) return;
    if (s1.type->kind != Type::Kind::Arrow || s2.type->kind != Type::Kind::Arrow) return;
    if (!core_type_equal(s1.type->dom(), s2.type->dom())) {
      inconclusive = true;
      inconclusive_detail = "argument types drift apart: " + pretty(s1.type->dom()) + " vs " + pretty(s2.type->dom());
      return;
    }
    for (auto& c : candidates(s1.type->dom(), sigma, 2)) {
      if (verdict || used >= cfg.budget) return;
      Side n1 = s1, n2 = s2;
      n1.term = capp(n1.term, c);
      n1.type = n1.type->cod();
      n2.term = capp(n2.term, c);
      n2.type = n2.type->cod();
      args.push_back(c);
      explore(n1, n2, args);
      args.pop_back();
    }
  }
};

}  // namespace

Equivalence behaviorally_equivalent(const CorePtr& e1, const CorePtr& e2, const TypePtr& t1, const TypePtr& t2,
                                    const StaticContext& sigma, const ProbeConfig& cfg) {
  ProbeUnifier u;
  std::vector<TypePtr> m1, m2;
  auto r1 = u.instantiate(t1, cfg.deep, m1);
  auto r2 = u.instantiate(t2, cfg.deep, m2);
  if (!u.unify(r1, r2))
    return {Equivalence::Kind::Distinguished,
            "types have no common instantiation: " + pretty(t1) + " vs " + pretty(t2)};
  Side s1{e1, t1, {}}, s2{e2, t2, {}};
  for (auto& m : m1) s1.queue.push_back(default_metas(u.zonk(m)));
  for (auto& m : m2) s2.queue.push_back(default_metas(u.zonk(m)));

  Prober p{sigma, cfg};
  std::vector<CorePtr> args;
  p.explore(s1, s2, args);
  if (p.verdict) return *p.verdict;
  if (p.inconclusive) return {Equivalence::Kind::Inconclusive, p.inconclusive_detail};
  return {Equivalence::Kind::Equivalent, std::to_string(p.used) + " probes agree"};
}

}  // namespace mplc
