#include "mplc/core.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mplc {

namespace {

CorePtr make(CoreExpr e) { return std::make_shared<const CoreExpr>(std::move(e)); }

}  // namespace

CorePtr cvar(const std::string& x) { return make({CoreExpr::Kind::Var, x}); }
CorePtr ccon(const std::string& k) { return make({CoreExpr::Kind::Con, k}); }
CorePtr clit(long long n) {
  CoreExpr e{CoreExpr::Kind::Lit};
  e.lit = n;
  return make(std::move(e));
}
CorePtr clam(const std::string& x, TypePtr t, CorePtr body) {
  CoreExpr e{CoreExpr::Kind::Lam, x};
  e.type = std::move(t);
  e.a = std::move(body);
  return make(std::move(e));
}
CorePtr capp(CorePtr f, CorePtr a) {
  CoreExpr e{CoreExpr::Kind::App};
  e.a = std::move(f);
  e.b = std::move(a);
  return make(std::move(e));
}
CorePtr ctylam(const std::string& a, CorePtr body) {
  CoreExpr e{CoreExpr::Kind::TyLam, a};
  e.a = std::move(body);
  return make(std::move(e));
}
CorePtr ctyapp(CorePtr f, TypePtr t) {
  CoreExpr e{CoreExpr::Kind::TyApp};
  e.a = std::move(f);
  e.type = std::move(t);
  return make(std::move(e));
}
CorePtr ccaselam(std::vector<CoreParam> params, TypePtr result, std::vector<CoreAlt> alts) {
  CoreExpr e{CoreExpr::Kind::CaseLam};
  e.params = std::move(params);
  e.type = std::move(result);
  e.alts = std::move(alts);
  return make(std::move(e));
}
CorePtr cundefined(TypePtr t) {
  CoreExpr e{CoreExpr::Kind::Undefined};
  e.type = std::move(t);
  return make(std::move(e));
}
CorePtr cseq() { return make({CoreExpr::Kind::Seq}); }
CorePtr clet(const std::string& x, TypePtr t, CorePtr rhs, CorePtr body) {
  return capp(clam(x, std::move(t), std::move(body)), std::move(rhs));
}

// ---------------------------------------------------------------- wrappers

WrapperPtr w_identity() {
  static const WrapperPtr w = std::make_shared<const CoreWrapper>();
  return w;
}
WrapperPtr w_apply_type(TypePtr t) {
  CoreWrapper w;
  w.kind = CoreWrapper::Kind::ApplyType;
  w.type = std::move(t);
  return std::make_shared<const CoreWrapper>(std::move(w));
}
WrapperPtr w_eta(TypePtr arg, WrapperPtr inner) {
  CoreWrapper w;
  w.kind = CoreWrapper::Kind::EtaExpand;
  w.type = std::move(arg);
  w.inner = std::move(inner);
  return std::make_shared<const CoreWrapper>(std::move(w));
}
WrapperPtr w_tyabs(const std::string& a) {
  CoreWrapper w;
  w.kind = CoreWrapper::Kind::TyAbstract;
  w.tyvar = a;
  return std::make_shared<const CoreWrapper>(std::move(w));
}
WrapperPtr w_compose(WrapperPtr outer, WrapperPtr inner) {
  if (is_identity(outer)) return inner;
  if (is_identity(inner)) return outer;
  CoreWrapper w;
  w.kind = CoreWrapper::Kind::Compose;
  w.outer = std::move(outer);
  w.inner = std::move(inner);
  return std::make_shared<const CoreWrapper>(std::move(w));
}
bool is_identity(const WrapperPtr& w) { return !w || w->kind == CoreWrapper::Kind::Identity; }

CorePtr apply_wrapper(const WrapperPtr& w, const CorePtr& e) {
  if (is_identity(w)) return e;
  switch (w->kind) {
    case CoreWrapper::Kind::Identity:
      return e;
    case CoreWrapper::Kind::ApplyType:
      return ctyapp(e, w->type);
    case CoreWrapper::Kind::TyAbstract:
      return ctylam(w->tyvar, e);
    case CoreWrapper::Kind::Compose:
      return apply_wrapper(w->outer, apply_wrapper(w->inner, e));
    case CoreWrapper::Kind::EtaExpand: {
      std::string x = fresh_name("eta");
      return clam(x, w->type, apply_wrapper(w->inner, capp(e, cvar(x))));
    }
  }
  return e;
}

// ---------------------------------------------------------------- traversal

namespace {

CorePattern map_pattern(const CorePattern& p, const std::function<TypePtr(const TypePtr&)>& fn) {
  CorePattern q = p;
  for (auto& t : q.type_args) t = fn(t);
  for (auto& a : q.args) a = map_pattern(a, fn);
  return q;
}

}  // namespace

CorePtr map_types(const CorePtr& e, const std::function<TypePtr(const TypePtr&)>& fn) {
  CoreExpr c = *e;
  if (c.type) c.type = fn(c.type);
  if (c.a) c.a = map_types(c.a, fn);
  if (c.b) c.b = map_types(c.b, fn);
  for (auto& p : c.params)
    if (p.type) p.type = fn(p.type);
  for (auto& alt : c.alts) {
    for (auto& p : alt.pats) p = map_pattern(p, fn);
    alt.body = map_types(alt.body, fn);
  }
  return make(std::move(c));
}

// ---------------------------------------------------------------- printing

namespace {

struct CorePrinter {
  std::unordered_map<std::string, std::string> rename;
  std::unordered_set<std::string> used;
  std::vector<std::string> order;

  void note(const std::string& n) {
    if (std::find(order.begin(), order.end(), n) == order.end()) order.push_back(n);
  }
  void scan_type(const TypePtr& t) {
    if (!t) return;
    if (t->kind == Type::Kind::Var) note(t->name);
    for (auto& a : t->args) scan_type(a);
  }
  void scan_pat(const CorePattern& p) {
    if (p.kind == CorePattern::Kind::Var) note(p.name);
    for (auto& t : p.type_args) scan_type(t);
    for (auto& a : p.args) scan_pat(a);
  }
  void scan(const CorePtr& e) {
    if (e->kind == CoreExpr::Kind::Var || e->kind == CoreExpr::Kind::Lam || e->kind == CoreExpr::Kind::TyLam)
      note(e->name);
    scan_type(e->type);
    if (e->a) scan(e->a);
    if (e->b) scan(e->b);
    for (auto& p : e->params) {
      if (p.is_type) note(p.tyvar);
      scan_type(p.type);
    }
    for (auto& alt : e->alts) {
      for (auto& p : alt.pats) scan_pat(p);
      scan(alt.body);
    }
  }

  explicit CorePrinter(const CorePtr& e) {
    scan(e);
    for (auto& n : order)
      if (n.find('#') == std::string::npos) used.insert(n);
    for (auto& n : order) {
      if (n.find('#') == std::string::npos) continue;
      std::string b = base_name(n), c;
      for (int i = 1;; ++i) {
        c = b + std::to_string(i);
        if (!used.count(c)) break;
      }
      used.insert(c);
      rename[n] = c;
    }
  }

  std::string name(const std::string& n) const {
    auto it = rename.find(n);
    return it == rename.end() ? n : it->second;
  }

  std::string type(const TypePtr& t) const {
    TypeSubst s;
    for (auto& v : free_type_vars(t))
      if (rename.count(v)) s[v] = tvar(rename.at(v));
    return pretty(substitute_type(s, t));
  }
  std::string type_atom(const TypePtr& t) const {
    bool atomic = t->kind == Type::Kind::Var ||
                  (t->kind == Type::Kind::Con && (t->args.empty() || t->name == kPair));
    return atomic ? type(t) : "(" + type(t) + ")";
  }

  void pat(const CorePattern& p, bool atomic, std::ostream& os) const {
    if (p.kind == CorePattern::Kind::Var) {
      os << name(p.name);
      return;
    }
    bool parens = atomic && (!p.args.empty() || !p.type_args.empty());
    if (parens) os << "(";
    os << p.name;
    for (auto& t : p.type_args) os << " @" << type_atom(t);
    for (auto& a : p.args) {
      os << " ";
      pat(a, true, os);
    }
    if (parens) os << ")";
  }

  // prec 0: top, 1: function position, 2: argument position
  void go(const CorePtr& e, int prec, std::ostream& os) const {
    switch (e->kind) {
      case CoreExpr::Kind::Var:
        os << name(e->name);
        return;
      case CoreExpr::Kind::Con:
        os << e->name;
        return;
      case CoreExpr::Kind::Lit:
        os << e->lit;
        return;
      case CoreExpr::Kind::Seq:
        os << "seq";
        return;
      case CoreExpr::Kind::Undefined:
        os << "undefined<" << type(e->type) << ">";
        return;
      case CoreExpr::Kind::App:
        if (prec > 1) os << "(";
        go(e->a, 1, os);
        os << " ";
        go(e->b, 2, os);
        if (prec > 1) os << ")";
        return;
      case CoreExpr::Kind::TyApp:
        if (prec > 1) os << "(";
        go(e->a, 1, os);
        os << " @" << type_atom(e->type);
        if (prec > 1) os << ")";
        return;
      case CoreExpr::Kind::Lam:
        if (prec > 0) os << "(";
        os << "\\(" << name(e->name) << " : " << type(e->type) << ") -> ";
        go(e->a, 0, os);
        if (prec > 0) os << ")";
        return;
      case CoreExpr::Kind::TyLam:
        if (prec > 0) os << "(";
        os << "/\\" << name(e->name) << " -> ";
        go(e->a, 0, os);
        if (prec > 0) os << ")";
        return;
      case CoreExpr::Kind::CaseLam: {
        if (prec > 0) os << "(";
        os << "\\case";
        for (auto& p : e->params) {
          if (p.is_type)
            os << " @" << name(p.tyvar);
          else
            os << " " << type_atom(p.type);
        }
        os << " : " << type(e->type) << " {";
        for (size_t i = 0; i < e->alts.size(); ++i) {
          os << (i ? "; " : " ");
          for (auto& p : e->alts[i].pats) {
            pat(p, true, os);
            os << " ";
          }
          os << "-> ";
          go(e->alts[i].body, 0, os);
        }
        os << " }";
        if (prec > 0) os << ")";
        return;
      }
    }
  }
};

bool pat_equal(const CorePattern& a, const CorePattern& b) {
  if (a.kind != b.kind || a.name != b.name || a.type_args.size() != b.type_args.size() ||
      a.args.size() != b.args.size())
    return false;
  for (size_t i = 0; i < a.type_args.size(); ++i)
    if (!alpha_equal(a.type_args[i], b.type_args[i])) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!pat_equal(a.args[i], b.args[i])) return false;
  return true;
}

}  // namespace

std::string pretty(const CorePtr& e) {
  CorePrinter p(e);
  std::ostringstream os;
  p.go(e, 0, os);
  return os.str();
}

bool core_equal(const CorePtr& a, const CorePtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name || a->lit != b->lit) return false;
  if ((a->type == nullptr) != (b->type == nullptr)) return false;
  if (a->type && !alpha_equal(a->type, b->type)) return false;
  if ((a->a == nullptr) != (b->a == nullptr) || (a->b == nullptr) != (b->b == nullptr)) return false;
  if (a->a && !core_equal(a->a, b->a)) return false;
  if (a->b && !core_equal(a->b, b->b)) return false;
  if (a->params.size() != b->params.size() || a->alts.size() != b->alts.size()) return false;
  for (size_t i = 0; i < a->params.size(); ++i) {
    auto &p = a->params[i], &q = b->params[i];
    if (p.is_type != q.is_type || p.tyvar != q.tyvar) return false;
    if (p.type && !alpha_equal(p.type, q.type)) return false;
  }
  for (size_t i = 0; i < a->alts.size(); ++i) {
    auto &x = a->alts[i], &y = b->alts[i];
    if (x.pats.size() != y.pats.size()) return false;
    for (size_t j = 0; j < x.pats.size(); ++j)
      if (!pat_equal(x.pats[j], y.pats[j])) return false;
    if (!core_equal(x.body, y.body)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- typing

bool core_type_equal(const TypePtr& a, const TypePtr& b) { return alpha_equal(a, b, false); }

namespace {

[[noreturn]] void core_fail(const std::string& msg, const CorePtr& e) {
  std::string s = pretty(e);
  if (s.size() > 160) s = s.substr(0, 157) + "...";
  throw CoreTypeError(msg + " in `" + s + "`");
}

void check_wf(const TypingContext& ctx, const TypePtr& t, const CorePtr& at) {
  std::vector<std::string> bound;
  std::function<void(const TypePtr&)> go = [&](const TypePtr& u) {
    switch (u->kind) {
      case Type::Kind::Var:
        if (std::find(bound.begin(), bound.end(), u->name) == bound.end() && !ctx.has_tyvar(u->name))
          core_fail("unbound type variable " + u->name, at);
        return;
      case Type::Kind::Meta:
        core_fail("unresolved unification variable", at);
      case Type::Kind::Forall:
        bound.push_back(u->name);
        go(u->body());
        bound.pop_back();
        return;
      case Type::Kind::Con: {
        auto it = ctx.base().tycons.find(u->name);
        if (it == ctx.base().tycons.end()) core_fail("unknown type constructor " + u->name, at);
        if (it->second != static_cast<int>(u->args.size())) core_fail("unsaturated type " + u->name, at);
        for (auto& a : u->args) go(a);
        return;
      }
      case Type::Kind::Arrow:
        go(u->dom());
        go(u->cod());
        return;
    }
  };
  go(t);
}

TypingContext bind_pattern(const TypingContext& ctx, const CorePattern& p, const TypePtr& t,
                           const CorePtr& at) {
  if (p.kind == CorePattern::Kind::Var) return ctx.with_term(p.name, t);
  auto* k = ctx.base().con(p.name);
  if (!k) core_fail("unknown constructor " + p.name, at);
  if (k->params.size() != p.type_args.size()) core_fail("constructor pattern type arity " + p.name, at);
  if (k->fields.size() != p.args.size()) core_fail("constructor pattern arity " + p.name, at);
  TypeSubst s;
  for (size_t i = 0; i < k->params.size(); ++i) {
    check_wf(ctx, p.type_args[i], at);
    s[k->params[i]] = p.type_args[i];
  }
  if (!core_type_equal(tcon(k->result, p.type_args), t))
    core_fail("pattern " + p.name + " does not match " + pretty(t), at);
  TypingContext c = ctx;
  for (size_t i = 0; i < p.args.size(); ++i) c = bind_pattern(c, p.args[i], substitute_type(s, k->fields[i]), at);
  return c;
}

TypePtr tc(const TypingContext& ctx, const CorePtr& e) {
  switch (e->kind) {
    case CoreExpr::Kind::Var: {
      auto* b = ctx.lookup_term(e->name);
      if (!b) core_fail("unbound variable " + e->name, e);
      return b->type;
    }
    case CoreExpr::Kind::Con: {
      auto* k = ctx.base().con(e->name);
      if (!k) core_fail("unknown constructor " + e->name, e);
      return k->scheme;
    }
    case CoreExpr::Kind::Lit:
      return tint();
    case CoreExpr::Kind::Seq:
      return tforall("a", Specificity::Specified,
                     tforall("b", Specificity::Specified, tarrow(tvar("a"), tarrow(tvar("b"), tvar("b")))));
    case CoreExpr::Kind::Undefined:
      check_wf(ctx, e->type, e);
      return e->type;
    case CoreExpr::Kind::Lam:
      check_wf(ctx, e->type, e);
      return tarrow(e->type, tc(ctx.with_term(e->name, e->type), e->a));
    case CoreExpr::Kind::App: {
      auto f = tc(ctx, e->a);
      if (f->kind != Type::Kind::Arrow) core_fail("applying a non-function of type " + pretty(f), e);
      auto a = tc(ctx, e->b);
      if (!core_type_equal(f->dom(), a))
        core_fail("argument type " + pretty(a) + " does not match " + pretty(f->dom()), e);
      return f->cod();
    }
    case CoreExpr::Kind::TyLam:
      return tforall(e->name, Specificity::Specified, tc(ctx.with_tyvar(e->name, std::nullopt), e->a));
    case CoreExpr::Kind::TyApp: {
      auto f = tc(ctx, e->a);
      if (f->kind != Type::Kind::Forall) core_fail("type application to " + pretty(f), e);
      check_wf(ctx, e->type, e);
      return substitute_type({{f->name, e->type}}, f->body());
    }
    case CoreExpr::Kind::CaseLam: {
      if (e->alts.empty()) core_fail("case lambda without alternatives", e);
      TypingContext inner = ctx;
      size_t nterm = 0;
      for (auto& p : e->params) {
        if (p.is_type) {
          inner = inner.with_tyvar(p.tyvar, std::nullopt);
        } else {
          check_wf(inner, p.type, e);
          ++nterm;
        }
      }
      check_wf(inner, e->type, e);
      for (auto& alt : e->alts) {
        if (alt.pats.size() != nterm) core_fail("alternative arity", e);
        TypingContext c = inner;
        size_t k = 0;
        for (auto& p : e->params)
          if (!p.is_type) c = bind_pattern(c, alt.pats[k++], p.type, e);
        auto bt = tc(c, alt.body);
        if (!core_type_equal(bt, e->type))
          core_fail("alternative has type " + pretty(bt) + ", expected " + pretty(e->type), e);
      }
      TypePtr t = e->type;
      for (auto it = e->params.rbegin(); it != e->params.rend(); ++it)
        t = it->is_type ? tforall(it->tyvar, Specificity::Specified, t) : tarrow(it->type, t);
      return t;
    }
  }
  core_fail("unknown node", e);
}

}  // namespace

TypePtr core_typecheck(const TypingContext& ctx, const CorePtr& e) { return tc(ctx, e); }

}  // namespace mplc
