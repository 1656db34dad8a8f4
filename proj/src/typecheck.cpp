#include "mplc/typecheck.hpp"

#include <algorithm>
#include <climits>
#include <set>

namespace mplc {

// ---------------------------------------------------------------- flavours and errors

std::string FlavourConfig::name() const {
  return std::string(eager() ? "eager" : "lazy") + "-" + (deep() ? "deep" : "shallow");
}

std::optional<FlavourConfig> FlavourConfig::parse(const std::string& s) {
  for (auto& f : all()) {
    std::string n = f.name();
    auto dash = n.find('-');
    std::string swapped = n.substr(dash + 1) + "-" + n.substr(0, dash);
    if (s == n || s == swapped) return f;
  }
  return std::nullopt;
}

std::vector<FlavourConfig> FlavourConfig::all() {
  return {{Depth::Deep, Eagerness::Eager},
          {Depth::Shallow, Eagerness::Eager},
          {Depth::Deep, Eagerness::Lazy},
          {Depth::Shallow, Eagerness::Lazy}};
}

std::string to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::UnboundConstructor: return "UnboundConstructor";
    case ErrorKind::UnboundTypeVariable: return "UnboundTypeVariable";
    case ErrorKind::UnknownTypeConstructor: return "UnknownTypeConstructor";
    case ErrorKind::OccursCheck: return "OccursCheck";
    case ErrorKind::ConstructorMismatch: return "ConstructorMismatch";
    case ErrorKind::ImpredicativeInstantiation: return "ImpredicativeInstantiation";
    case ErrorKind::SkolemEscape: return "SkolemEscape";
    case ErrorKind::TypeApplicationError: return "TypeApplicationError";
    case ErrorKind::TooManyArguments: return "TooManyArguments";
    case ErrorKind::SpecificityMismatch: return "SpecificityMismatch";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::EquationTypeMismatch: return "EquationTypeMismatch";
  }
  return "?";
}

TypeError::TypeError(ErrorKind kind, std::string rule, std::string message, SrcPos pos)
    : std::runtime_error(to_string(kind) + " [" + rule + "]: " + message),
      kind(kind),
      rule(std::move(rule)),
      message(std::move(message)),
      pos(pos) {}

// ---------------------------------------------------------------- pure helpers

BinderList binders(Depth depth, const TypePtr& t) {
  BinderList out;
  TypePtr cur = t;
  while (cur->kind == Type::Kind::Forall) {
    out.vars.emplace_back(cur->name, cur->spec);
    cur = cur->body();
  }
  if (depth == Depth::Deep && cur->kind == Type::Kind::Arrow) {
    auto rest = binders(depth, cur->cod());
    // keep binder names distinct from the ones already collected
    for (auto& [n, s] : rest.vars) out.vars.emplace_back(n, s);
    out.residual = tarrow(cur->dom(), rest.residual);
    return out;
  }
  out.residual = cur;
  return out;
}

TypePtr assemble_type(const std::vector<PatDescriptor>& ps, const TypePtr& residual) {
  TypePtr t = residual;
  for (size_t i = ps.size(); i-- > 0;)
    t = ps[i].is_type ? tforall(ps[i].tyvar, Specificity::Specified, t) : tarrow(ps[i].type, t);
  return t;
}

// ---------------------------------------------------------------- checker state

Checker::Checker(FlavourConfig cfg, std::shared_ptr<const StaticContext> sigma)
    : cfg_(cfg), sigma_(std::move(sigma)) {}

TypingContext Checker::empty_context() const { return TypingContext(sigma_); }

void Checker::fail(ErrorKind k, const std::string& rule, const std::string& msg) const {
  throw TypeError(k, rule, msg, pos_);
}

TypePtr Checker::fresh_meta() {
  metas_.push_back({nullptr, level_});
  return tmeta(static_cast<int>(metas_.size()) - 1);
}

TypePtr Checker::zonk(const TypePtr& t) const {
  switch (t->kind) {
    case Type::Kind::Meta: {
      auto& m = metas_.at(t->meta);
      return m.solution ? zonk(m.solution) : t;
    }
    case Type::Kind::Var:
      return t;
    case Type::Kind::Arrow:
      return tarrow(zonk(t->dom()), zonk(t->cod()));
    case Type::Kind::Con: {
      if (t->args.empty()) return t;
      std::vector<TypePtr> as;
      for (auto& a : t->args) as.push_back(zonk(a));
      return tcon(t->name, std::move(as));
    }
    case Type::Kind::Forall:
      return tforall(t->name, t->spec, zonk(t->body()));
  }
  return t;
}

namespace {

TypePtr default_unit(const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::Meta:
      return tunit();
    case Type::Kind::Var:
      return t;
    case Type::Kind::Arrow:
      return tarrow(default_unit(t->dom()), default_unit(t->cod()));
    case Type::Kind::Con: {
      std::vector<TypePtr> as;
      for (auto& a : t->args) as.push_back(default_unit(a));
      return tcon(t->name, std::move(as));
    }
    case Type::Kind::Forall:
      return tforall(t->name, t->spec, default_unit(t->body()));
  }
  return t;
}

}  // namespace

CorePtr Checker::finalize(const CorePtr& e) const {
  return map_types(e, [this](const TypePtr& t) { return default_unit(zonk(t)); });
}

std::string Checker::new_skolem(const std::string& hint) {
  std::string s = fresh_name(base_name(hint));
  skolem_level_[s] = level_;
  return s;
}

void Checker::lower_levels(const TypePtr& t, int level) {
  for (int m : free_metas(zonk(t)))
    if (metas_[m].level > level) metas_[m].level = level;
}

// ---------------------------------------------------------------- unification

void Checker::solve(int m, const TypePtr& t0) {
  TypePtr t = zonk(t0);
  if (has_forall(t))
    fail(ErrorKind::ImpredicativeInstantiation, "unify",
         "cannot instantiate a unification variable with the polytype " + pretty(t));
  auto ms = free_metas(t);
  if (std::find(ms.begin(), ms.end(), m) != ms.end())
    fail(ErrorKind::OccursCheck, "unify", "?" + std::to_string(m) + " occurs in " + pretty(t));
  for (auto& v : free_type_vars(t)) {
    auto it = skolem_level_.find(v);
    if (it != skolem_level_.end() && it->second > metas_[m].level)
      fail(ErrorKind::SkolemEscape, "unify", "type variable " + base_name(v) + " would escape its scope");
  }
  lower_levels(t, metas_[m].level);
  metas_[m].solution = t;
}

void Checker::unify_rec(const TypePtr& a0, const TypePtr& b0) {
  TypePtr a = zonk(a0), b = zonk(b0);
  if (a->kind == Type::Kind::Meta && b->kind == Type::Kind::Meta && a->meta == b->meta) return;
  if (a->kind == Type::Kind::Meta) return solve(a->meta, b);
  if (b->kind == Type::Kind::Meta) return solve(b->meta, a);
  auto mismatch = [&] {
    fail(ErrorKind::ConstructorMismatch, "unify", "cannot match " + pretty(a) + " with " + pretty(b));
  };
  if (a->kind != b->kind) {
    if (a->kind == Type::Kind::Forall || b->kind == Type::Kind::Forall)
      fail(ErrorKind::ImpredicativeInstantiation, "unify",
           "polytype " + pretty(a->kind == Type::Kind::Forall ? a : b) + " does not match instantiated type " +
               pretty(a->kind == Type::Kind::Forall ? b : a));
    mismatch();
  }
  switch (a->kind) {
    case Type::Kind::Var:
      if (a->name != b->name) mismatch();
      return;
    case Type::Kind::Arrow:
      unify_rec(a->dom(), b->dom());
      unify_rec(a->cod(), b->cod());
      return;
    case Type::Kind::Con:
      if (a->name != b->name || a->args.size() != b->args.size()) mismatch();
      for (size_t i = 0; i < a->args.size(); ++i) unify_rec(a->args[i], b->args[i]);
      return;
    case Type::Kind::Forall: {
      // binders are matched positionally; a rigid variable no meta may capture
      std::string s = fresh_name(base_name(a->name));
      skolem_level_[s] = INT_MAX;
      unify_rec(substitute_type({{a->name, tvar(s)}}, a->body()), substitute_type({{b->name, tvar(s)}}, b->body()));
      return;
    }
    default:
      mismatch();
  }
}

void Checker::unify(const TypePtr& a, const TypePtr& b) { unify_rec(a, b); }

// ---------------------------------------------------------------- instantiation and skolemisation

InstResult Checker::inst_rec(const TypePtr& t, bool deep) {
  InstResult r{t, w_identity(), {}};
  TypePtr cur = t;
  while (cur->kind == Type::Kind::Forall) {
    auto m = fresh_meta();
    r.args.push_back(m);
    cur = substitute_type({{cur->name, m}}, cur->body());
    r.wrapper = w_compose(w_apply_type(m), r.wrapper);
  }
  if (deep && cur->kind == Type::Kind::Arrow && !binders(Depth::Deep, cur->cod()).vars.empty()) {
    auto inner = inst_rec(cur->cod(), true);
    r.args.insert(r.args.end(), inner.args.begin(), inner.args.end());
    cur = tarrow(cur->dom(), inner.residual);
    r.wrapper = w_compose(w_eta(cur->dom(), inner.wrapper), r.wrapper);
  }
  r.residual = cur;
  return r;
}

InstResult Checker::instantiate(const TypePtr& t) { return inst_rec(zonk(t), cfg_.deep()); }

SkolResult Checker::skolemise(const TypingContext& ctx, const TypePtr& t, Depth depth) {
  SkolResult r{zonk(t), ctx, w_identity()};
  TypePtr cur = r.residual;
  while (cur->kind == Type::Kind::Forall) {
    std::string s = new_skolem(cur->name);
    r.ctx = r.ctx.with_tyvar(s, std::nullopt, level_);
    cur = substitute_type({{cur->name, tvar(s)}}, cur->body());
    r.wrapper = w_compose(r.wrapper, w_tyabs(s));
  }
  if (depth == Depth::Deep && cur->kind == Type::Kind::Arrow && !binders(Depth::Deep, cur->cod()).vars.empty()) {
    auto inner = skolemise(r.ctx, cur->cod(), depth);
    r.ctx = inner.ctx;
    r.wrapper = w_compose(r.wrapper, w_eta(cur->dom(), inner.wrapper));
    cur = tarrow(cur->dom(), inner.residual);
  }
  r.residual = cur;
  return r;
}

// ---------------------------------------------------------------- type resolution

namespace {

void resolve_rec(const TypingContext& ctx, const StaticContext& sigma, const TypePtr& t,
                 std::vector<std::string>& bound, std::vector<std::string>& unbound, TypeSubst& map,
                 bool& bad_con, std::string& bad_name) {
  switch (t->kind) {
    case Type::Kind::Var: {
      if (std::find(bound.begin(), bound.end(), t->name) != bound.end()) return;
      if (map.count(t->name)) return;
      if (auto e = ctx.lookup_source_tyvar(t->name)) {
        map[t->name] = tvar(e->name);
        return;
      }
      if (ctx.has_tyvar(t->name)) return;
      if (std::find(unbound.begin(), unbound.end(), t->name) == unbound.end()) unbound.push_back(t->name);
      return;
    }
    case Type::Kind::Con: {
      auto it = sigma.tycons.find(t->name);
      if ((it == sigma.tycons.end() || it->second != static_cast<int>(t->args.size())) && !bad_con) {
        bad_con = true;
        bad_name = t->name;
      }
      for (auto& a : t->args) resolve_rec(ctx, sigma, a, bound, unbound, map, bad_con, bad_name);
      return;
    }
    case Type::Kind::Forall:
      bound.push_back(t->name);
      resolve_rec(ctx, sigma, t->body(), bound, unbound, map, bad_con, bad_name);
      bound.pop_back();
      return;
    default:
      for (auto& a : t->args) resolve_rec(ctx, sigma, a, bound, unbound, map, bad_con, bad_name);
  }
}

}  // namespace

TypePtr Checker::resolve_type(const TypingContext& ctx, const TypePtr& t, bool implicit) {
  std::vector<std::string> bound, unbound;
  TypeSubst map;
  bool bad_con = false;
  std::string bad_name;
  resolve_rec(ctx, *sigma_, t, bound, unbound, map, bad_con, bad_name);
  if (bad_con)
    fail(ErrorKind::UnknownTypeConstructor, "type well-formedness",
         "unknown or unsaturated type constructor " + bad_name);
  if (!unbound.empty() && !implicit)
    fail(ErrorKind::UnboundTypeVariable, "type well-formedness", "type variable " + unbound.front() + " is not in scope");
  TypePtr r = substitute_type(map, t);
  for (size_t i = unbound.size(); i-- > 0;) r = tforall(unbound[i], Specificity::Specified, r);
  return r;
}

// ---------------------------------------------------------------- expressions

std::pair<TypePtr, CorePtr> Checker::synthesise(const TypingContext& ctx, const ExprPtr& e) {
  if (e->pos.line > 0) pos_ = e->pos;
  switch (e->kind) {
    case Expr::Kind::App: {
      auto [sigma, f] = synthesise_head(ctx, e->head);
      auto [res, g] = check_args(ctx, e->args, sigma, f);
      if (cfg_.eager()) {
        auto r = instantiate(res);
        return {r.residual, apply_wrapper(r.wrapper, g)};
      }
      return {res, g};
    }
    case Expr::Kind::Lam: {
      auto a = fresh_meta();
      auto [eta, f] = synthesise(ctx.with_term(e->var, a), e->body);
      return {tarrow(a, eta), clam(e->var, a, f)};
    }
    case Expr::Kind::TyLam: {
      TypePtr t;
      CorePtr f;
      {
        LevelScope scope(*this);
        std::string s = new_skolem(e->var);
        auto [eta, body] = synthesise(ctx.with_tyvar(s, e->var, level_), e->body);
        t = tforall(s, Specificity::Specified, eta);
        f = ctylam(s, body);
      }
      lower_levels(t, level_);
      if (cfg_.eager()) {
        auto r = instantiate(t);
        return {r.residual, apply_wrapper(r.wrapper, f)};
      }
      return {t, f};
    }
    case Expr::Kind::Let: {
      auto d = check_decl(ctx, *e->decl);
      auto [eta, f] = synthesise(d.ctx, e->body);
      return {eta, elaborate_let(*e->decl, d, f, eta)};
    }
  }
  fail(ErrorKind::ConstructorMismatch, "synthesise", "unknown expression form");
}

CorePtr Checker::check(const TypingContext& ctx, const ExprPtr& e, const TypePtr& expected) {
  if (e->pos.line > 0) pos_ = e->pos;
  switch (e->kind) {
    case Expr::Kind::Lam: {
      LevelScope scope(*this);
      auto sk = skolemise(ctx, expected, Depth::Shallow);
      TypePtr rho = zonk(sk.residual);
      if (rho->kind == Type::Kind::Meta) {
        unify(rho, tarrow(fresh_meta(), fresh_meta()));
        rho = zonk(rho);
      }
      if (rho->kind != Type::Kind::Arrow)
        fail(ErrorKind::ConstructorMismatch, "Tm-CheckAbs",
             "lambda \\" + e->var + " checked against non-function type " + pretty(rho));
      auto f = check(sk.ctx.with_term(e->var, rho->dom()), e->body, rho->cod());
      return apply_wrapper(sk.wrapper, clam(e->var, rho->dom(), f));
    }
    case Expr::Kind::TyLam: {
      LevelScope scope(*this);
      TypePtr cur = zonk(expected);
      TypingContext c = ctx;
      WrapperPtr w = w_identity();
      bool skipped = false;
      while (cur->kind == Type::Kind::Forall && cur->spec == Specificity::Inferred) {
        std::string s = new_skolem(cur->name);
        c = c.with_tyvar(s, std::nullopt, level_);
        w = w_compose(w, w_tyabs(s));
        cur = substitute_type({{cur->name, tvar(s)}}, cur->body());
        skipped = true;
      }
      if (cur->kind != Type::Kind::Forall)
        fail(skipped ? ErrorKind::SpecificityMismatch : ErrorKind::ConstructorMismatch, "Tm-CheckTyAbs",
             "type abstraction /\\" + e->var + " requires a specified quantifier, but the expected type is " +
                 pretty(zonk(expected)));
      std::string s = new_skolem(e->var);
      c = c.with_tyvar(s, e->var, level_);
      auto f = check(c, e->body, substitute_type({{cur->name, tvar(s)}}, cur->body()));
      return apply_wrapper(w, ctylam(s, f));
    }
    case Expr::Kind::Let: {
      auto d = check_decl(ctx, *e->decl);
      auto f = check(d.ctx, e->body, expected);
      return elaborate_let(*e->decl, d, f, expected);
    }
    case Expr::Kind::App: {
      LevelScope scope(*this);
      auto sk = skolemise(ctx, expected, cfg_.depth);
      auto [eta, f] = synthesise(sk.ctx, e);
      auto r = instantiate(eta);
      unify(r.residual, sk.residual);
      return apply_wrapper(sk.wrapper, apply_wrapper(r.wrapper, f));
    }
  }
  fail(ErrorKind::ConstructorMismatch, "check", "unknown expression form");
}

std::pair<TypePtr, CorePtr> Checker::synthesise_head(const TypingContext& ctx, const Head& h) {
  switch (h.kind) {
    case Head::Kind::Var: {
      auto e = ctx.lookup_term(h.name);
      if (!e) fail(ErrorKind::UnboundVariable, "H-Var", "variable " + h.name + " is not in scope");
      return {e->type, cvar(h.name)};
    }
    case Head::Kind::Con: {
      auto c = sigma_->con(h.name);
      if (!c) fail(ErrorKind::UnboundConstructor, "H-Con", "constructor " + h.name + " is not defined");
      return {c->scheme, ccon(h.name)};
    }
    case Head::Kind::Lit:
      return {tint(), clit(h.lit)};
    case Head::Kind::Ann: {
      auto t = resolve_type(ctx, h.type, false);
      auto f = check(ctx, h.expr, t);
      return {t, f};
    }
    case Head::Kind::Inf:
      return synthesise(ctx, h.expr);
    case Head::Kind::Undefined: {
      auto t = tforall("a", Specificity::Specified, tvar("a"));
      return {t, cundefined(t)};
    }
    case Head::Kind::Seq: {
      auto t = tforall("a", Specificity::Specified,
                       tforall("b", Specificity::Specified, tarrow(tvar("a"), tarrow(tvar("b"), tvar("b")))));
      return {t, cseq()};
    }
  }
  fail(ErrorKind::ConstructorMismatch, "head", "unknown head form");
}

std::pair<TypePtr, CorePtr> Checker::check_args(const TypingContext& ctx, const std::vector<Arg>& args,
                                                const TypePtr& fun, CorePtr core) {
  TypePtr cur = fun;
  size_t i = 0;
  while (i < args.size()) {
    cur = zonk(cur);
    const Arg& a = args[i];
    if (cur->kind == Type::Kind::Forall) {
      if (cur->spec == Specificity::Inferred || !a.is_type()) {
        // Arg-InfInst / Arg-Inst
        auto m = fresh_meta();
        core = ctyapp(core, m);
        cur = substitute_type({{cur->name, m}}, cur->body());
        continue;
      }
      auto t = resolve_type(ctx, a.type, false);
      core = ctyapp(core, t);
      cur = substitute_type({{cur->name, t}}, cur->body());
      ++i;
      continue;
    }
    if (a.is_type())
      fail(ErrorKind::TypeApplicationError, "Arg-TyApp",
           "cannot apply type argument @" + pretty(a.type) + " to an expression of type " + pretty(cur));
    if (cur->kind == Type::Kind::Meta) {
      unify(cur, tarrow(fresh_meta(), fresh_meta()));
      cur = zonk(cur);
    }
    if (cur->kind != Type::Kind::Arrow)
      fail(ErrorKind::TooManyArguments, "Arg-App", "an expression of type " + pretty(cur) + " cannot take an argument");
    auto f = check(ctx, a.term, cur->dom());
    core = capp(core, f);
    cur = cur->cod();
    ++i;
  }
  return {cur, core};
}

CorePtr Checker::elaborate_let(const Decl& d, const DeclOutcome& dr, const CorePtr& body, const TypePtr& body_type) {
  CorePtr b = body;
  if (d.strict) b = capp(capp(ctyapp(ctyapp(cseq(), dr.type), body_type), cvar(d.name)), body);
  return clet(d.name, dr.type, dr.core, b);
}

// ---------------------------------------------------------------- patterns

TypePtr Checker::check_pattern(const TypingContext& ctx, const Pattern& p, const TypePtr& t, TypingContext& out,
                               CorePattern& core) {
  switch (p.kind) {
    case Pattern::Kind::Var:
      if (p.ann) unify(resolve_type(ctx, p.ann, false), t);
      out = out.with_term(p.name, t);
      core = CorePattern{CorePattern::Kind::Var, p.name, {}, {}};
      return t;
    case Pattern::Kind::TyVar:
      fail(ErrorKind::TypeApplicationError, "Pat-CheckTyVar",
           "type pattern @" + p.name + " is not allowed inside a constructor pattern");
    case Pattern::Kind::Con: {
      auto ci = sigma_->con(p.name);
      if (!ci) fail(ErrorKind::UnboundConstructor, "Pat-InfCon", "constructor " + p.name + " is not defined");
      if (p.type_args.size() > ci->params.size())
        fail(ErrorKind::ArityMismatch, "Pat-InfCon", "too many type arguments for constructor " + p.name);
      if (p.args.size() != ci->fields.size())
        fail(ErrorKind::ArityMismatch, "Pat-InfCon",
             "constructor " + p.name + " expects " + std::to_string(ci->fields.size()) + " arguments, got " +
                 std::to_string(p.args.size()));
      TypeSubst s;
      std::vector<TypePtr> targs;
      for (size_t j = 0; j < ci->params.size(); ++j) {
        TypePtr a = j < p.type_args.size() ? resolve_type(ctx, p.type_args[j], false) : fresh_meta();
        s[ci->params[j]] = a;
        targs.push_back(a);
      }
      unify(tcon(ci->result, targs), t);
      core = CorePattern{CorePattern::Kind::Con, p.name, targs, {}};
      for (size_t j = 0; j < p.args.size(); ++j) {
        CorePattern sub;
        check_pattern(ctx, p.args[j], substitute_type(s, ci->fields[j]), out, sub);
        core.args.push_back(std::move(sub));
      }
      return t;
    }
  }
  return t;
}

PatternResult Checker::check_patterns_synth(const TypingContext& ctx, const std::vector<Pattern>& ps,
                                            const std::vector<PatDescriptor>* reuse) {
  PatternResult r{{}, nullptr, ctx, {}, {}};
  for (size_t i = 0; i < ps.size(); ++i) {
    const Pattern& p = ps[i];
    const PatDescriptor* prev = reuse ? &(*reuse)[i] : nullptr;
    if (prev && prev->is_type != (p.kind == Pattern::Kind::TyVar))
      fail(ErrorKind::EquationTypeMismatch, "Decl-NoAnnMulti", "equations disagree on type and term patterns");
    if (p.kind == Pattern::Kind::TyVar) {
      std::string s = prev ? prev->tyvar : new_skolem(p.name);
      r.ctx = r.ctx.with_tyvar(s, p.name, level_);
      r.descriptors.push_back({true, s, nullptr});
      r.params.push_back({true, s, nullptr});
      continue;
    }
    TypePtr t;
    if (prev)
      t = prev->type;
    else if (p.kind == Pattern::Kind::Var && p.ann)
      t = resolve_type(r.ctx, p.ann, false);
    else
      t = fresh_meta();
    CorePattern cp;
    if (p.kind == Pattern::Kind::Var && p.ann && !prev) {
      r.ctx = r.ctx.with_term(p.name, t);
      cp = CorePattern{CorePattern::Kind::Var, p.name, {}, {}};
    } else {
      TypingContext out = r.ctx;
      check_pattern(r.ctx, p, t, out, cp);
      r.ctx = out;
    }
    r.descriptors.push_back({false, {}, t});
    r.params.push_back({false, {}, t});
    r.pats.push_back(std::move(cp));
  }
  return r;
}

PatternResult Checker::check_patterns_check(const TypingContext& ctx, const std::vector<Pattern>& ps,
                                            const TypePtr& against, std::vector<std::string>* skolems) {
  PatternResult r{{}, nullptr, ctx, {}, {}};
  size_t k = 0;
  auto take = [&](const std::string& hint) {
    if (skolems && k < skolems->size()) return (*skolems)[k++];
    std::string s = new_skolem(hint);
    if (skolems) skolems->push_back(s);
    ++k;
    return s;
  };
  TypePtr cur = zonk(against);
  size_t i = 0;
  bool skipped_inferred = false;
  while (i < ps.size()) {
    cur = zonk(cur);
    const Pattern& p = ps[i];
    if (cur->kind == Type::Kind::Forall) {
      bool bind_here = p.kind == Pattern::Kind::TyVar && cur->spec == Specificity::Specified;
      std::string s = take(bind_here ? p.name : cur->name);
      r.ctx = r.ctx.with_tyvar(s, bind_here ? std::optional<std::string>(p.name) : std::nullopt, level_);
      r.params.push_back({true, s, nullptr});
      if (cur->spec == Specificity::Inferred) skipped_inferred = true;
      cur = substitute_type({{cur->name, tvar(s)}}, cur->body());
      if (bind_here) ++i;
      continue;
    }
    if (p.kind == Pattern::Kind::TyVar)
      fail(skipped_inferred ? ErrorKind::SpecificityMismatch : ErrorKind::TypeApplicationError, "Pat-CheckTyVar",
           "type pattern @" + p.name + " has no specified quantifier to bind in " + pretty(cur));
    if (cur->kind == Type::Kind::Meta) {
      unify(cur, tarrow(fresh_meta(), fresh_meta()));
      cur = zonk(cur);
    }
    if (cur->kind != Type::Kind::Arrow)
      fail(ErrorKind::TooManyArguments, "Pat-CheckVar", "too many patterns for type " + pretty(zonk(against)));
    TypingContext out = r.ctx;
    CorePattern cp;
    check_pattern(r.ctx, p, cur->dom(), out, cp);
    r.ctx = out;
    r.params.push_back({false, {}, cur->dom()});
    r.pats.push_back(std::move(cp));
    cur = cur->cod();
    ++i;
  }
  r.residual = cur;
  return r;
}

// ---------------------------------------------------------------- declarations

std::pair<TypePtr, std::vector<std::string>> Checker::generalise(const TypePtr& t0) {
  TypePtr t = zonk(t0);
  std::set<std::string> used;
  std::function<void(const TypePtr&)> names = [&](const TypePtr& u) {
    if (u->kind == Type::Kind::Var || u->kind == Type::Kind::Forall) used.insert(base_name(u->name));
    for (auto& a : u->args) names(a);
  };
  names(t);
  std::vector<std::pair<std::string, Specificity>> bs;
  std::vector<std::string> out;
  int next = 0;
  for (int m : free_metas(t)) {
    if (metas_[m].level <= level_) continue;
    std::string n;
    do {
      n = next < 26 ? std::string(1, static_cast<char>('a' + next)) : "t" + std::to_string(next - 26);
      ++next;
    } while (used.count(n));
    std::string internal = fresh_name(n);
    metas_[m].solution = tvar(internal);
    bs.emplace_back(internal, Specificity::Inferred);
    out.push_back(internal);
  }
  return {tforalls(bs, zonk(t)), out};
}

Checker::DeclOutcome Checker::check_decl(const TypingContext& ctx, const Decl& d) {
  if (d.pos.line > 0) pos_ = d.pos;
  if (d.sig) {
    TypePtr sigma = resolve_type(ctx, d.sig, true);
    std::vector<std::string> skolems;
    std::vector<CoreAlt> alts;
    std::vector<CoreParam> params0;
    TypePtr residual0;
    for (size_t k = 0; k < d.eqs.size(); ++k) {
      LevelScope scope(*this);
      auto pr = check_patterns_check(ctx, d.eqs[k].pats, sigma, &skolems);
      auto f = check(pr.ctx, d.eqs[k].rhs, pr.residual);
      if (k == 0) {
        params0 = pr.params;
        residual0 = pr.residual;
      } else {
        bool same = pr.params.size() == params0.size();
        for (size_t j = 0; same && j < params0.size(); ++j)
          same = pr.params[j].is_type == params0[j].is_type &&
                 (pr.params[j].is_type ? pr.params[j].tyvar == params0[j].tyvar
                                       : alpha_equal(zonk(pr.params[j].type), zonk(params0[j].type), false));
        if (!same)
          fail(ErrorKind::EquationTypeMismatch, "Decl-Ann", "equations of " + d.name + " bind different parameters");
      }
      alts.push_back({pr.pats, f});
    }
    CorePtr core = d.eqs.size() == 1 && params0.empty() ? alts[0].body : ccaselam(params0, residual0, alts);
    return {ctx.with_term(d.name, sigma), sigma, core};
  }

  TypePtr sigma1;
  CorePtr core;
  {
    LevelScope scope(*this);
    if (d.eqs.size() == 1) {
      auto pr = check_patterns_synth(ctx, d.eqs[0].pats);
      auto [eta, f] = synthesise(pr.ctx, d.eqs[0].rhs);
      sigma1 = assemble_type(pr.descriptors, eta);
      core = d.eqs[0].pats.empty() ? f : ccaselam(pr.params, eta, {{pr.pats, f}});
    } else {
      std::optional<PatternResult> first;
      TypePtr rho0;
      std::vector<CoreAlt> alts;
      for (size_t k = 0; k < d.eqs.size(); ++k) {
        auto pr = k == 0 ? check_patterns_synth(ctx, d.eqs[k].pats)
                         : check_patterns_synth(ctx, d.eqs[k].pats, &first->descriptors);
        if (k == 0) first = pr;
        auto [eta, f] = synthesise(pr.ctx, d.eqs[k].rhs);
        if (!cfg_.eager()) {
          auto r = instantiate(eta);
          eta = r.residual;
          f = apply_wrapper(r.wrapper, f);
        }
        if (k == 0) {
          rho0 = eta;
        } else {
          try {
            unify(rho0, eta);
          } catch (const TypeError& e) {
            fail(ErrorKind::EquationTypeMismatch, "Decl-NoAnnMulti",
                 "equations of " + d.name + " have different types: " + e.message);
          }
        }
        alts.push_back({pr.pats, f});
      }
      sigma1 = assemble_type(first->descriptors, rho0);
      core = ccaselam(first->params, rho0, alts);
    }
  }
  auto [sigma, names] = generalise(sigma1);
  for (size_t i = names.size(); i-- > 0;) core = ctylam(names[i], core);
  return {ctx.with_term(d.name, sigma), sigma, core};
}

// ---------------------------------------------------------------- programs

ProgramResult Checker::check_program(const Program& p) {
  ProgramResult out;
  out.sigma = sigma_;
  TypingContext ctx = empty_context();
  for (auto& d : p.decls) {
    auto r = check_decl(ctx, d);
    ctx = r.ctx;
    out.decls.push_back({d.name, r.type, r.core, d.strict});
  }
  if (p.main) {
    auto [t, f] = synthesise(ctx, p.main);
    out.main_type = default_unit(zonk(t));
    out.main_core = f;
  }
  for (auto& d : out.decls) {
    d.type = zonk(d.type);
    d.core = finalize(d.core);
  }
  if (out.main_core) out.main_core = finalize(out.main_core);
  return out;
}

const DeclResult* ProgramResult::find(const std::string& name) const {
  for (size_t i = decls.size(); i-- > 0;)
    if (decls[i].name == name) return &decls[i];
  return nullptr;
}

namespace {

CorePtr bind_prefix(const std::vector<DeclResult>& ds, size_t upto, CorePtr body, const TypePtr& body_type) {
  for (size_t j = upto; j-- > 0;) {
    if (ds[j].strict) body = capp(capp(ctyapp(ctyapp(cseq(), ds[j].type), body_type), cvar(ds[j].name)), body);
    body = clet(ds[j].name, ds[j].type, ds[j].core, body);
  }
  return body;
}

}  // namespace

CorePtr ProgramResult::closed_decl(size_t i) const {
  return bind_prefix(decls, i, decls[i].core, decls[i].type);
}

CorePtr ProgramResult::closed_main() const {
  if (!main_core) return nullptr;
  return bind_prefix(decls, decls.size(), main_core, main_type);
}

ProgramResult check_program(const Program& p, FlavourConfig cfg) {
  auto sigma = std::make_shared<StaticContext>(StaticContext::builtin());
  for (auto& d : p.data) {
    try {
      sigma->add_data(d);
    } catch (const std::runtime_error& e) {
      throw TypeError(ErrorKind::UnknownTypeConstructor, "data declaration", e.what());
    }
  }
  Checker c(cfg, sigma);
  return c.check_program(p);
}

}  // namespace mplc
