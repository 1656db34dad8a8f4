#include <algorithm>
#include <sstream>

#include "mplc/core.hpp"

namespace mplc {

namespace {

void core_ftv(const CorePtr& e, std::vector<std::string>& bound, std::vector<std::string>& out) {
  auto add = [&](const TypePtr& t) {
    if (!t) return;
    for (auto& v : free_type_vars(t))
      if (std::find(bound.begin(), bound.end(), v) == bound.end() &&
          std::find(out.begin(), out.end(), v) == out.end())
        out.push_back(v);
  };
  std::function<void(const CorePattern&)> pat = [&](const CorePattern& p) {
    for (auto& t : p.type_args) add(t);
    for (auto& a : p.args) pat(a);
  };
  switch (e->kind) {
    case CoreExpr::Kind::TyLam:
      bound.push_back(e->name);
      core_ftv(e->a, bound, out);
      bound.pop_back();
      return;
    case CoreExpr::Kind::CaseLam: {
      size_t n = bound.size();
      for (auto& p : e->params) {
        if (p.is_type)
          bound.push_back(p.tyvar);
        else
          add(p.type);
      }
      add(e->type);
      for (auto& alt : e->alts) {
        for (auto& p : alt.pats) pat(p);
        core_ftv(alt.body, bound, out);
      }
      bound.resize(n);
      return;
    }
    default:
      add(e->type);
      if (e->a) core_ftv(e->a, bound, out);
      if (e->b) core_ftv(e->b, bound, out);
  }
}

std::vector<std::string> core_ftv(const CorePtr& e) {
  std::vector<std::string> bound, out;
  core_ftv(e, bound, out);
  return out;
}

bool pattern_binds(const CorePattern& p, const std::string& x) {
  if (p.kind == CorePattern::Kind::Var) return p.name == x;
  for (auto& a : p.args)
    if (pattern_binds(a, x)) return true;
  return false;
}

CorePtr subst_tyvar(const CorePtr& e, const std::string& a, const TypePtr& t,
                    const std::vector<std::string>& t_fv);

// Renames type binder `from` to `to` throughout e (e is the binder's scope).
CorePtr rename_tyvar(const CorePtr& e, const std::string& from, const std::string& to) {
  auto tv = tvar(to);
  return subst_tyvar(e, from, tv, {to});
}

CorePattern subst_pat_ty(const CorePattern& p, const TypeSubst& s) {
  CorePattern q = p;
  for (auto& t : q.type_args) t = substitute_type(s, t);
  for (auto& x : q.args) x = subst_pat_ty(x, s);
  return q;
}

CorePtr subst_tyvar(const CorePtr& e, const std::string& a, const TypePtr& t,
                    const std::vector<std::string>& t_fv) {
  TypeSubst s{{a, t}};
  auto captures = [&](const std::string& b) {
    return std::find(t_fv.begin(), t_fv.end(), b) != t_fv.end();
  };
  switch (e->kind) {
    case CoreExpr::Kind::Var:
    case CoreExpr::Kind::Con:
    case CoreExpr::Kind::Lit:
    case CoreExpr::Kind::Seq:
      return e;
    case CoreExpr::Kind::Undefined:
      return cundefined(substitute_type(s, e->type));
    case CoreExpr::Kind::Lam:
      return clam(e->name, substitute_type(s, e->type), subst_tyvar(e->a, a, t, t_fv));
    case CoreExpr::Kind::App:
      return capp(subst_tyvar(e->a, a, t, t_fv), subst_tyvar(e->b, a, t, t_fv));
    case CoreExpr::Kind::TyApp:
      return ctyapp(subst_tyvar(e->a, a, t, t_fv), substitute_type(s, e->type));
    case CoreExpr::Kind::TyLam: {
      if (e->name == a) return e;
      if (captures(e->name)) {
        std::string fresh = fresh_name(e->name);
        auto body = rename_tyvar(e->a, e->name, fresh);
        return ctylam(fresh, subst_tyvar(body, a, t, t_fv));
      }
      return ctylam(e->name, subst_tyvar(e->a, a, t, t_fv));
    }
    case CoreExpr::Kind::CaseLam: {
      CoreExpr c = *e;
      bool shadowed = false;
      std::vector<std::pair<std::string, std::string>> renames;
      for (auto& p : c.params) {
        if (!p.is_type) continue;
        if (p.tyvar == a) shadowed = true;
        if (!shadowed && captures(p.tyvar)) {
          std::string fresh = fresh_name(p.tyvar);
          renames.emplace_back(p.tyvar, fresh);
          p.tyvar = fresh;
        }
      }
      // Apply binder renames first, then the substitution itself.
      TypeSubst rs;
      for (auto& [from, to] : renames) rs[from] = tvar(to);
      for (auto& p : c.params)
        if (!p.is_type) p.type = substitute_type(rs, p.type);
      c.type = substitute_type(rs, c.type);
      for (auto& alt : c.alts) {
        for (auto& p : alt.pats) p = subst_pat_ty(p, rs);
        for (auto& [from, to] : renames) alt.body = rename_tyvar(alt.body, from, to);
      }
      if (!shadowed) {
        for (auto& p : c.params)
          if (!p.is_type) p.type = substitute_type(s, p.type);
        c.type = substitute_type(s, c.type);
        for (auto& alt : c.alts) {
          for (auto& p : alt.pats) p = subst_pat_ty(p, s);
          alt.body = subst_tyvar(alt.body, a, t, t_fv);
        }
      } else {
        // a is rebound by a later type parameter; only earlier term params see the outer a
        bool seen = false;
        for (auto& p : c.params) {
          if (p.is_type && p.tyvar == a) seen = true;
          if (!p.is_type && !seen) p.type = substitute_type(s, p.type);
        }
      }
      return std::make_shared<const CoreExpr>(std::move(c));
    }
  }
  return e;
}

CorePtr subst_term(const CorePtr& e, const std::string& x, const CorePtr& v,
                   const std::vector<std::string>& v_fv) {
  auto captures = [&](const std::string& b) {
    return std::find(v_fv.begin(), v_fv.end(), b) != v_fv.end();
  };
  switch (e->kind) {
    case CoreExpr::Kind::Var:
      return e->name == x ? v : e;
    case CoreExpr::Kind::Con:
    case CoreExpr::Kind::Lit:
    case CoreExpr::Kind::Seq:
    case CoreExpr::Kind::Undefined:
      return e;
    case CoreExpr::Kind::Lam:
      if (e->name == x) return e;
      return clam(e->name, e->type, subst_term(e->a, x, v, v_fv));
    case CoreExpr::Kind::App:
      return capp(subst_term(e->a, x, v, v_fv), subst_term(e->b, x, v, v_fv));
    case CoreExpr::Kind::TyApp:
      return ctyapp(subst_term(e->a, x, v, v_fv), e->type);
    case CoreExpr::Kind::TyLam: {
      if (captures(e->name)) {
        std::string fresh = fresh_name(e->name);
        auto body = rename_tyvar(e->a, e->name, fresh);
        return ctylam(fresh, subst_term(body, x, v, v_fv));
      }
      return ctylam(e->name, subst_term(e->a, x, v, v_fv));
    }
    case CoreExpr::Kind::CaseLam: {
      CoreExpr c = *e;
      for (auto& p : c.params) {
        if (!p.is_type || !captures(p.tyvar)) continue;
        std::string fresh = fresh_name(p.tyvar);
        TypeSubst rs{{p.tyvar, tvar(fresh)}};
        for (auto& q : c.params)
          if (!q.is_type) q.type = substitute_type(rs, q.type);
        c.type = substitute_type(rs, c.type);
        for (auto& alt : c.alts) {
          for (auto& q : alt.pats) q = subst_pat_ty(q, rs);
          alt.body = rename_tyvar(alt.body, p.tyvar, fresh);
        }
        p.tyvar = fresh;
      }
      for (auto& alt : c.alts) {
        bool bound = false;
        for (auto& p : alt.pats) bound |= pattern_binds(p, x);
        if (!bound) alt.body = subst_term(alt.body, x, v, v_fv);
      }
      return std::make_shared<const CoreExpr>(std::move(c));
    }
  }
  return e;
}

struct SpineArg {
  CorePtr term;
  TypePtr type;
  bool is_type() const { return type != nullptr; }
};

CorePtr decompose(const CorePtr& e, std::vector<SpineArg>& args) {
  CorePtr h = e;
  while (h->kind == CoreExpr::Kind::App || h->kind == CoreExpr::Kind::TyApp) {
    if (h->kind == CoreExpr::Kind::App)
      args.push_back({h->b, nullptr});
    else
      args.push_back({nullptr, h->type});
    h = h->a;
  }
  std::reverse(args.begin(), args.end());
  return h;
}

CorePtr rebuild(CorePtr h, const std::vector<SpineArg>& args, size_t from) {
  for (size_t i = from; i < args.size(); ++i) h = args[i].is_type() ? ctyapp(h, args[i].type) : capp(h, args[i].term);
  return h;
}

StepResult value() { return {StepResult::Kind::Value, nullptr, {}}; }
StepResult stepped(CorePtr e, bool loops = false) { return {StepResult::Kind::Stepped, std::move(e), {}, loops}; }
StepResult stuck(std::string why) { return {StepResult::Kind::Stuck, nullptr, std::move(why)}; }

struct MatchResult {
  enum class Kind { Match, Fail, Force, Stuck };
  Kind kind;
  CorePtr forced;  // replacement for the scrutinee when forcing
  std::string why;
  bool loops = false;
};

MatchResult match(const CorePattern& p, const CorePtr& arg, const StaticContext& sigma,
                  std::vector<std::pair<std::string, CorePtr>>& binds) {
  if (p.kind == CorePattern::Kind::Var) {
    binds.emplace_back(p.name, arg);
    return {MatchResult::Kind::Match};
  }
  auto r = step(arg, sigma);
  if (r.kind == StepResult::Kind::Stuck) return {MatchResult::Kind::Stuck, nullptr, r.why};
  if (r.kind == StepResult::Kind::Stepped) return {MatchResult::Kind::Force, r.next, {}, r.loops};
  std::vector<SpineArg> args;
  auto h = decompose(arg, args);
  if (h->kind != CoreExpr::Kind::Con) return {MatchResult::Kind::Stuck, nullptr, "scrutinee is not a constructor"};
  if (h->name != p.name) return {MatchResult::Kind::Fail};
  std::vector<size_t> fields;
  for (size_t i = 0; i < args.size(); ++i)
    if (!args[i].is_type()) fields.push_back(i);
  if (fields.size() != p.args.size()) return {MatchResult::Kind::Stuck, nullptr, "constructor arity"};
  for (size_t j = 0; j < fields.size(); ++j) {
    auto sub = match(p.args[j], args[fields[j]].term, sigma, binds);
    if (sub.kind == MatchResult::Kind::Force) {
      auto copy = args;
      copy[fields[j]].term = sub.forced;
      return {MatchResult::Kind::Force, rebuild(h, copy, 0), {}, sub.loops};
    }
    if (sub.kind != MatchResult::Kind::Match) return sub;
  }
  return {MatchResult::Kind::Match};
}

StepResult step_caselam(const CorePtr& h, const std::vector<SpineArg>& args, const StaticContext& sigma) {
  const auto& ps = h->params;
  int last_term = -1;
  for (size_t i = 0; i < ps.size(); ++i)
    if (!ps[i].is_type) last_term = static_cast<int>(i);
  // with no term parameters the case lambda reduces once its type arguments are known
  size_t need = last_term < 0 ? 0 : static_cast<size_t>(last_term) + 1;
  if (args.size() < need) return value();
  for (size_t i = 0; i < need; ++i)
    if (ps[i].is_type != args[i].is_type()) return stuck("case lambda argument kind mismatch");

  TypeSubst tys;
  for (size_t i = 0; i < need; ++i)
    if (ps[i].is_type) tys[ps[i].tyvar] = args[i].type;

  std::vector<size_t> term_idx;
  for (size_t i = 0; i < need; ++i)
    if (!ps[i].is_type) term_idx.push_back(i);

  for (auto& alt : h->alts) {
    std::vector<std::pair<std::string, CorePtr>> binds;
    bool failed = false;
    for (size_t j = 0; j < term_idx.size(); ++j) {
      auto m = match(alt.pats[j], args[term_idx[j]].term, sigma, binds);
      if (m.kind == MatchResult::Kind::Stuck) return stuck(m.why);
      if (m.kind == MatchResult::Kind::Force) {
        auto copy = args;
        copy[term_idx[j]].term = m.forced;
        return stepped(rebuild(h, copy, 0), m.loops);
      }
      if (m.kind == MatchResult::Kind::Fail) {
        failed = true;
        break;
      }
    }
    if (failed) continue;
    CorePtr body = alt.body;
    for (size_t i = 0; i < need; ++i) {
      if (!ps[i].is_type) continue;
      auto& t = args[i].type;
      body = subst_tyvar(body, ps[i].tyvar, t, free_type_vars(t));
    }
    for (auto& [x, v] : binds) {
      // pattern binders are distinct, so sequential substitution is safe
      body = subst_term(body, x, v, core_ftv(v));
    }
    for (size_t i = ps.size(); i-- > need;) body = ctylam(ps[i].tyvar, body);
    return stepped(rebuild(body, args, need));
  }
  // no alternative matched: the result diverges
  TypePtr rest = h->type;
  for (size_t i = ps.size(); i-- > need;) rest = tforall(ps[i].tyvar, Specificity::Specified, rest);
  rest = substitute_type(tys, rest);
  return stepped(rebuild(cundefined(rest), args, need));
}

}  // namespace

StepResult step(const CorePtr& e, const StaticContext& sigma) {
  if (e->kind == CoreExpr::Kind::TyLam) {
    auto r = step(e->a, sigma);
    if (r.kind == StepResult::Kind::Stepped) return stepped(ctylam(e->name, r.next), r.loops);
    return r;
  }
  std::vector<SpineArg> args;
  CorePtr h = decompose(e, args);
  switch (h->kind) {
    case CoreExpr::Kind::Var:
      return stuck("free variable " + h->name);
    case CoreExpr::Kind::Con:
    case CoreExpr::Kind::Lit:
      return value();
    case CoreExpr::Kind::Lam:
      if (args.empty()) return value();
      if (args[0].is_type()) return stuck("type applied to a lambda");
      return stepped(rebuild(subst_term(h->a, h->name, args[0].term, core_ftv(args[0].term)), args, 1));
    case CoreExpr::Kind::TyLam: {
      if (!args[0].is_type()) return stuck("term applied to a type abstraction");
      auto& t = args[0].type;
      return stepped(rebuild(subst_tyvar(h->a, h->name, t, free_type_vars(t)), args, 1));
    }
    case CoreExpr::Kind::Seq: {
      std::vector<size_t> terms;
      for (size_t i = 0; i < args.size(); ++i)
        if (!args[i].is_type()) terms.push_back(i);
      if (terms.size() < 2) return value();
      auto r = step(args[terms[0]].term, sigma);
      if (r.kind == StepResult::Kind::Stuck) return r;
      if (r.kind == StepResult::Kind::Stepped) {
        auto copy = args;
        copy[terms[0]].term = r.next;
        return stepped(rebuild(h, copy, 0), r.loops);
      }
      return stepped(rebuild(args[terms[1]].term, args, terms[1] + 1));
    }
    case CoreExpr::Kind::Undefined: {
      bool poly = h->type->kind == Type::Kind::Forall;
      if (args.empty()) return poly ? value() : stepped(e, true);
      if (args[0].is_type()) {
        if (!poly) return stuck("type applied to monomorphic undefined");
        auto t = substitute_type({{h->type->name, args[0].type}}, h->type->body());
        return stepped(rebuild(cundefined(t), args, 1));
      }
      if (poly) return stuck("term applied to polymorphic undefined");
      return stepped(e, true);
    }
    case CoreExpr::Kind::CaseLam: {
      bool has_term = std::any_of(h->params.begin(), h->params.end(), [](auto& p) { return !p.is_type; });
      if (!has_term && args.size() < h->params.size()) {
        // only type parameters, not all supplied: behaves like nested type abstractions
        size_t k = args.size();
        for (size_t i = 0; i < k; ++i)
          if (!args[i].is_type()) return stuck("case lambda argument kind mismatch");
        CorePtr body = h->alts[0].body;
        for (size_t i = 0; i < k; ++i) body = subst_tyvar(body, h->params[i].tyvar, args[i].type, free_type_vars(args[i].type));
        for (size_t i = h->params.size(); i-- > k;) body = ctylam(h->params[i].tyvar, body);
        return stepped(body);
      }
      return step_caselam(h, args, sigma);
    }
    default:
      return stuck("unexpected spine head");
  }
}

EvalOutcome evaluate(const CorePtr& e, long fuel, const StaticContext& sigma) {
  CorePtr cur = e;
  long steps = 0;
  while (true) {
    auto r = step(cur, sigma);
    if (r.kind == StepResult::Kind::Value) return {EvalOutcome::Kind::Value, cur, steps, {}};
    if (r.kind == StepResult::Kind::Stuck) return {EvalOutcome::Kind::Stuck, cur, steps, r.why};
    cur = r.next;
    if (r.loops) return {EvalOutcome::Kind::FuelExhausted, cur, fuel, {}};
    if (++steps >= fuel) return {EvalOutcome::Kind::FuelExhausted, cur, steps, {}};
  }
}

namespace {

void describe(const CorePtr& v, long fuel, int depth, const StaticContext& sigma, std::ostream& os) {
  CorePtr cur = v;
  while (cur->kind == CoreExpr::Kind::TyLam) cur = cur->a;
  std::vector<SpineArg> args;
  auto h = decompose(cur, args);
  if (h->kind == CoreExpr::Kind::Lit) {
    os << h->lit;
    return;
  }
  if (h->kind != CoreExpr::Kind::Con) {
    os << "<function>";
    return;
  }
  std::vector<CorePtr> fields;
  for (auto& a : args)
    if (!a.is_type()) fields.push_back(a.term);
  if (fields.empty()) {
    os << h->name;
    return;
  }
  bool tuple = h->name == kPair;
  os << "(" << (tuple ? "" : h->name);
  for (size_t i = 0; i < fields.size(); ++i) {
    auto& f = fields[i];
    os << (!tuple ? " " : i > 0 ? ", " : "");
    if (depth <= 0) {
      os << "_";
      continue;
    }
    auto r = evaluate(f, fuel, sigma);
    if (r.kind == EvalOutcome::Kind::Value)
      describe(r.value, fuel, depth - 1, sigma, os);
    else if (r.kind == EvalOutcome::Kind::FuelExhausted)
      os << "<diverges>";
    else
      os << "<stuck>";
  }
  os << ")";
}

}  // namespace

std::string describe_value(const CorePtr& v, long fuel, const StaticContext& sigma) {
  std::ostringstream os;
  describe(v, fuel, 3, sigma, os);
  return os.str();
}

}  // namespace mplc
