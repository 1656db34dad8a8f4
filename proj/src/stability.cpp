#include "mplc/stability.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "mplc/parser.hpp"

namespace mplc {

std::string to_string(PropertyId p) {
  static const char* names[] = {"P1", "P2", "P3", "P4", "P4b", "P5", "P6", "P7", "P8", "P9", "P10", "P11", "P11b"};
  return names[static_cast<int>(p)];
}

std::optional<PropertyId> parse_property(const std::string& s) {
  std::string k;
  for (char c : s) k += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (!k.empty() && k[0] == 'p') k = k.substr(1);
  for (auto p : all_properties()) {
    std::string n = to_string(p).substr(1);
    for (auto& c : n) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (n == k) return p;
  }
  return std::nullopt;
}

const std::vector<PropertyId>& all_properties() {
  using P = PropertyId;
  static const std::vector<PropertyId> all = {P::P1, P::P2,  P::P3, P::P4, P::P4b, P::P5,  P::P6,
                                              P::P7, P::P8, P::P9, P::P10, P::P11, P::P11b};
  return all;
}

bool is_runtime_property(PropertyId p) {
  return p == PropertyId::P3 || p == PropertyId::P5 || p == PropertyId::P6 || p == PropertyId::P8;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::CounterexampleFound:
      return "counterexample";
    case Verdict::NotApplicable:
      return "not-applicable";
  }
  return {};
}

// ---------------------------------------------------------------- helpers

std::optional<ExprPtr> wrap_patterns(const std::vector<Pattern>& ps, const ExprPtr& rhs) {
  ExprPtr e = rhs;
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
    if (it->kind == Pattern::Kind::Var && !it->ann)
      e = mk_lam(it->name, e);
    else if (it->kind == Pattern::Kind::TyVar)
      e = mk_tylam(it->name, e);
    else
      return std::nullopt;
  }
  return e;
}

std::pair<std::vector<Pattern>, ExprPtr> unwrap_lambdas(const ExprPtr& e) {
  std::vector<Pattern> ps;
  ExprPtr cur = e;
  while (cur->kind == Expr::Kind::Lam || cur->kind == Expr::Kind::TyLam) {
    Pattern p;
    p.kind = cur->kind == Expr::Kind::Lam ? Pattern::Kind::Var : Pattern::Kind::TyVar;
    p.name = cur->var;
    ps.push_back(p);
    cur = cur->body;
  }
  return {ps, cur};
}

int numargs(Depth, const TypePtr& t) {
  int n = 0;
  TypePtr cur = t;
  while (true) {
    while (cur->kind == Type::Kind::Forall) cur = cur->body();
    if (cur->kind != Type::Kind::Arrow) return n;
    ++n;
    cur = cur->cod();
  }
}

namespace {

void pattern_vars(const Pattern& p, std::set<std::string>& out) {
  if (p.kind == Pattern::Kind::Var) out.insert(p.name);
  for (auto& a : p.args) pattern_vars(a, out);
}

void free_vars(const ExprPtr& e, const std::set<std::string>& bound, std::set<std::string>& out);

void free_vars_decl(const Decl& d, const std::set<std::string>& bound, std::set<std::string>& out) {
  for (auto& eq : d.eqs) {
    std::set<std::string> b = bound;
    for (auto& p : eq.pats) pattern_vars(p, b);
    free_vars(eq.rhs, b, out);
  }
}

void free_vars(const ExprPtr& e, const std::set<std::string>& bound, std::set<std::string>& out) {
  switch (e->kind) {
    case Expr::Kind::App:
      if (e->head.kind == Head::Kind::Var && !bound.count(e->head.name)) out.insert(e->head.name);
      if (e->head.expr) free_vars(e->head.expr, bound, out);
      for (auto& a : e->args)
        if (a.term) free_vars(a.term, bound, out);
      return;
    case Expr::Kind::Lam: {
      auto b = bound;
      b.insert(e->var);
      free_vars(e->body, b, out);
      return;
    }
    case Expr::Kind::TyLam:
      free_vars(e->body, bound, out);
      return;
    case Expr::Kind::Let: {
      free_vars_decl(*e->decl, bound, out);
      auto b = bound;
      b.insert(e->decl->name);
      free_vars(e->body, b, out);
      return;
    }
  }
}

std::set<std::string> fv(const ExprPtr& e) {
  std::set<std::string> out;
  free_vars(e, {}, out);
  return out;
}

void all_names(const ExprPtr& e, std::set<std::string>& out) {
  switch (e->kind) {
    case Expr::Kind::App:
      if (e->head.kind == Head::Kind::Var) out.insert(e->head.name);
      if (e->head.expr) all_names(e->head.expr, out);
      for (auto& a : e->args)
        if (a.term) all_names(a.term, out);
      return;
    case Expr::Kind::Lam:
    case Expr::Kind::TyLam:
      out.insert(e->var);
      all_names(e->body, out);
      return;
    case Expr::Kind::Let:
      out.insert(e->decl->name);
      for (auto& eq : e->decl->eqs) {
        for (auto& p : eq.pats) pattern_vars(p, out);
        all_names(eq.rhs, out);
      }
      all_names(e->body, out);
      return;
  }
}

std::set<std::string> program_names(const Program& p) {
  std::set<std::string> out;
  for (auto& d : p.decls) {
    out.insert(d.name);
    for (auto& eq : d.eqs) {
      for (auto& pt : eq.pats) pattern_vars(pt, out);
      all_names(eq.rhs, out);
    }
  }
  if (p.main) all_names(p.main, out);
  return out;
}

std::string fresh_identifier(const std::string& base, std::set<std::string>& used) {
  for (int i = 1;; ++i) {
    std::string n = base + std::to_string(i);
    if (used.insert(n).second) return n;
  }
}

struct Capture {};

// Capture-avoiding substitution of r for x; throws Capture instead of renaming.
struct Substituter {
  std::string x;
  ExprPtr r;
  std::set<std::string> fvr;

  bool free_in(const ExprPtr& e) const { return fv(e).count(x) > 0; }

  ExprPtr expr(const ExprPtr& e) const {
    switch (e->kind) {
      case Expr::Kind::App: {
        std::vector<Arg> args;
        for (auto& a : e->args) args.push_back(a.term ? term_arg(expr(a.term)) : a);
        if (e->head.kind == Head::Kind::Var && e->head.name == x) return apply_spine(r, std::move(args));
        Head h = e->head;
        if (h.expr) h.expr = expr(h.expr);
        return mk_app(h, std::move(args), e->pos);
      }
      case Expr::Kind::Lam:
        if (e->var == x) return e;
        if (fvr.count(e->var) && free_in(e->body)) throw Capture{};
        return mk_lam(e->var, expr(e->body));
      case Expr::Kind::TyLam:
        return mk_tylam(e->var, expr(e->body));
      case Expr::Kind::Let: {
        Decl d = decl(*e->decl);
        if (e->decl->name == x) return mk_let(d, e->body);
        if (fvr.count(e->decl->name) && free_in(e->body)) throw Capture{};
        return mk_let(d, expr(e->body));
      }
    }
    return e;
  }

  Decl decl(const Decl& d0) const {
    Decl d = d0;
    for (auto& eq : d.eqs) {
      std::set<std::string> bound;
      for (auto& p : eq.pats) pattern_vars(p, bound);
      if (bound.count(x)) continue;
      for (auto& b : bound)
        if (fvr.count(b) && free_in(eq.rhs)) throw Capture{};
      eq.rhs = expr(eq.rhs);
    }
    return d;
  }
};

int find_decl(const Program& p, const std::string& name) {
  for (size_t i = 0; i < p.decls.size(); ++i)
    if (p.decls[i].name == name) return static_cast<int>(i);
  return -1;
}

bool simple_binding(const Decl& d) { return !d.sig && d.eqs.size() == 1 && d.eqs[0].pats.empty() && !d.strict; }

// Replaces the head of the first spine headed by a global in `globals` with `fresh`.
struct Extractor {
  std::set<std::string> globals;
  std::string fresh;
  std::string extracted;

  ExprPtr expr(const ExprPtr& e, const std::set<std::string>& bound) {
    if (!extracted.empty()) return e;
    switch (e->kind) {
      case Expr::Kind::App: {
        if (e->head.kind == Head::Kind::Var && !e->args.empty() && globals.count(e->head.name) &&
            !bound.count(e->head.name)) {
          extracted = e->head.name;
          return mk_app(hvar(fresh), e->args, e->pos);
        }
        Head h = e->head;
        if (h.expr) h.expr = expr(h.expr, bound);
        std::vector<Arg> args;
        for (auto& a : e->args) args.push_back(a.term ? term_arg(expr(a.term, bound)) : a);
        return mk_app(h, std::move(args), e->pos);
      }
      case Expr::Kind::Lam: {
        auto b = bound;
        b.insert(e->var);
        return mk_lam(e->var, expr(e->body, b));
      }
      case Expr::Kind::TyLam:
        return mk_tylam(e->var, expr(e->body, bound));
      case Expr::Kind::Let: {
        Decl d = decl(*e->decl, bound);
        auto b = bound;
        b.insert(d.name);
        return mk_let(d, expr(e->body, b));
      }
    }
    return e;
  }

  Decl decl(const Decl& d0, const std::set<std::string>& bound) {
    Decl d = d0;
    for (auto& eq : d.eqs) {
      auto b = bound;
      for (auto& p : eq.pats) pattern_vars(p, b);
      eq.rhs = expr(eq.rhs, b);
    }
    return d;
  }
};

}  // namespace

// ---------------------------------------------------------------- transformations

std::optional<Program> apply_transformation(const Transformation& t, const Program& p) {
  Program out = p;
  int k = t.target == "main" ? -1 : find_decl(p, t.target);
  if (t.kind != TransformKind::LetExtract && k < 0) return std::nullopt;
  switch (t.kind) {
    case TransformKind::LetInline: {
      const Decl& d = p.decls[k];
      if (!simple_binding(d)) return std::nullopt;
      Substituter s{d.name, d.eqs[0].rhs, fv(d.eqs[0].rhs)};
      for (size_t j = k + 1; j < p.decls.size(); ++j)
        if (p.decls[j].name == d.name || s.fvr.count(p.decls[j].name)) return std::nullopt;
      try {
        out.decls.clear();
        for (size_t j = 0; j < p.decls.size(); ++j) {
          if (static_cast<int>(j) < k) out.decls.push_back(p.decls[j]);
          if (static_cast<int>(j) > k) out.decls.push_back(s.decl(p.decls[j]));
        }
        if (p.main) out.main = s.expr(p.main);
      } catch (const Capture&) {
        return std::nullopt;
      }
      return out;
    }
    case TransformKind::LetExtract: {
      if (k < 0 && (t.target != "main" || !p.main)) return std::nullopt;
      auto used = program_names(p);
      Extractor ex;
      size_t limit = k < 0 ? p.decls.size() : static_cast<size_t>(k);
      for (size_t j = 0; j < limit; ++j) ex.globals.insert(p.decls[j].name);
      ex.fresh = fresh_identifier("extracted", used);
      if (k < 0)
        out.main = ex.expr(p.main, {});
      else
        out.decls[k] = ex.decl(p.decls[k], {});
      if (ex.extracted.empty()) return std::nullopt;
      Decl nd;
      nd.name = ex.fresh;
      nd.eqs.push_back({{}, mk_var(ex.extracted)});
      out.decls.insert(out.decls.begin() + limit, nd);
      return out;
    }
    case TransformKind::AddInferredSignature:
      if (p.decls[k].sig || !t.signature) return std::nullopt;
      out.decls[k].sig = t.signature;
      return out;
    case TransformKind::SwapSignature:
      if (!p.decls[k].sig || !t.signature) return std::nullopt;
      out.decls[k].sig = t.signature;
      return out;
    case TransformKind::PatternInline: {
      const Decl& d = p.decls[k];
      if (d.sig || d.eqs.size() != 1 || d.eqs[0].pats.empty()) return std::nullopt;
      auto w = wrap_patterns(d.eqs[0].pats, d.eqs[0].rhs);
      if (!w) return std::nullopt;
      out.decls[k].eqs[0] = {{}, *w};
      return out;
    }
    case TransformKind::PatternExtract: {
      const Decl& d = p.decls[k];
      if (!simple_binding(d)) return std::nullopt;
      auto [ps, rhs] = unwrap_lambdas(d.eqs[0].rhs);
      if (ps.empty()) return std::nullopt;
      out.decls[k].eqs[0] = {ps, rhs};
      return out;
    }
    case TransformKind::DuplicateEquation: {
      const Decl& d = p.decls[k];
      if (d.sig || d.eqs.size() != 1) return std::nullopt;
      out.decls[k].eqs.push_back(d.eqs[0]);
      return out;
    }
    case TransformKind::EtaExpand: {
      const Decl& d = p.decls[k];
      if (!simple_binding(d) || t.n < 1) return std::nullopt;
      auto used = program_names(p);
      std::vector<std::string> xs;
      std::vector<Arg> args;
      for (int i = 0; i < t.n; ++i) {
        xs.push_back(fresh_identifier("eta", used));
        args.push_back(term_arg(mk_var(xs.back())));
      }
      ExprPtr body = apply_spine(d.eqs[0].rhs, args);
      for (auto it = xs.rbegin(); it != xs.rend(); ++it) body = mk_lam(*it, body);
      out.decls[k].eqs[0] = {{}, body};
      return out;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- property checks

namespace {

struct Checked {
  std::optional<ProgramResult> result;
  std::string error;
  bool ok() const { return result.has_value(); }
};

Checked run_checker(const Program& p, FlavourConfig f) {
  try {
    return {check_program(p, f), {}};
  } catch (const TypeError& e) {
    return {std::nullopt, e.what()};
  } catch (const std::runtime_error& e) {
    return {std::nullopt, e.what()};
  }
}

struct Outcome {
  Verdict verdict = Verdict::NotApplicable;
  std::string detail;
  int inconclusive = 0;
};

Outcome compare_types(const Checked& a, const Checked& b) {
  if (!a.ok() && !b.ok()) return {Verdict::NotApplicable, "both rejected"};
  if (a.ok() != b.ok())
    return {Verdict::CounterexampleFound,
            a.ok() ? "original accepted, transformed rejected: " + b.error
                   : "original rejected (" + a.error + "), transformed accepted"};
  for (auto& d : a.result->decls) {
    auto other = b.result->find(d.name);
    if (!other) continue;
    if (!alpha_equal(d.type, other->type))
      return {Verdict::CounterexampleFound,
              "type of " + d.name + " changed: " + pretty(d.type) + " vs " + pretty(other->type)};
  }
  if (a.result->main_type && b.result->main_type && !alpha_equal(a.result->main_type, b.result->main_type))
    return {Verdict::CounterexampleFound,
            "type of main changed: " + pretty(a.result->main_type) + " vs " + pretty(b.result->main_type)};
  return {Verdict::Holds, {}};
}

bool no_common_instantiation(const Equivalence& e) {
  return e.kind == Equivalence::Kind::Distinguished && e.detail.rfind("types have no common instantiation", 0) == 0;
}

// Compares closed elaborations of the declarations whose own elaboration differs, and main.
Outcome compare_runtime(const Checked& a, const Checked& b, FlavourConfig f, const HarnessConfig& cfg,
                        const std::string& only = {}) {
  if (!a.ok() || !b.ok()) return {Verdict::NotApplicable, "not accepted by both sides"};
  ProbeConfig probe = cfg.probe;
  probe.deep = f.deep();
  const ProgramResult& ra = *a.result;
  const ProgramResult& rb = *b.result;
  Outcome out{Verdict::NotApplicable, {}};
  auto one = [&](const std::string& name, const CorePtr& c1, const CorePtr& c2, const TypePtr& t1,
                 const TypePtr& t2) -> bool {
    if (core_equal(c1, c2) && alpha_equal(t1, t2, false)) {
      out.verdict = Verdict::Holds;
      return false;
    }
    auto eq = behaviorally_equivalent(c1, c2, t1, t2, *ra.sigma, probe);
    if (no_common_instantiation(eq)) return false;
    if (eq.kind == Equivalence::Kind::Distinguished) {
      out = {Verdict::CounterexampleFound, name + ": " + eq.detail, out.inconclusive};
      return true;
    }
    if (eq.kind == Equivalence::Kind::Inconclusive) ++out.inconclusive;
    out.verdict = Verdict::Holds;
    return false;
  };
  for (size_t i = 0; i < ra.decls.size(); ++i) {
    if (!only.empty() && ra.decls[i].name != only) continue;
    for (size_t j = 0; j < rb.decls.size(); ++j) {
      if (rb.decls[j].name != ra.decls[i].name) continue;
      if (core_equal(ra.decls[i].core, rb.decls[j].core) && alpha_equal(ra.decls[i].type, rb.decls[j].type, false)) {
        out.verdict = Verdict::Holds;
        break;
      }
      if (one(ra.decls[i].name, ra.closed_decl(i), rb.closed_decl(j), ra.decls[i].type, rb.decls[j].type))
        return out;
      break;
    }
  }
  if (only.empty() && ra.main_core && rb.main_core && !core_equal(ra.main_core, rb.main_core))
    one("main", ra.closed_main(), rb.closed_main(), ra.main_type, rb.main_type);
  return out;
}

bool forall_in_domain(const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::Arrow:
      return has_forall(t->dom()) || forall_in_domain(t->cod());
    case Type::Kind::Forall:
      return forall_in_domain(t->body());
    case Type::Kind::Con:
      for (auto& a : t->args)
        if (forall_in_domain(a)) return true;
      return false;
    default:
      return false;
  }
}

TypePtr float_prenex(const TypePtr& t) {
  if (t->kind == Type::Kind::Forall) return tforall(t->name, t->spec, float_prenex(t->body()));
  if (t->kind == Type::Kind::Arrow) {
    auto cod = float_prenex(t->cod());
    std::vector<std::pair<std::string, Specificity>> bs;
    while (cod->kind == Type::Kind::Forall) {
      if (occurs_var(cod->name, t->dom())) return tarrow(t->dom(), cod);
      bs.push_back({cod->name, cod->spec});
      cod = cod->body();
    }
    return tforalls(bs, tarrow(t->dom(), cod));
  }
  return t;
}

// Pushes the outermost binder past argument types that do not mention it.
TypePtr sink_binder(const TypePtr& t) {
  if (t->kind != Type::Kind::Forall) return nullptr;
  TypePtr body = t->body();
  std::vector<TypePtr> doms;
  while (body->kind == Type::Kind::Arrow && !occurs_var(t->name, body->dom())) {
    doms.push_back(body->dom());
    body = body->cod();
  }
  if (doms.empty()) return nullptr;
  TypePtr r = tforall(t->name, t->spec, body);
  for (auto it = doms.rbegin(); it != doms.rend(); ++it) r = tarrow(*it, r);
  return r;
}

TypePtr flip_specificity(const TypePtr& t) {
  if (t->kind != Type::Kind::Forall) return nullptr;
  auto s = t->spec == Specificity::Specified ? Specificity::Inferred : Specificity::Specified;
  return tforall(t->name, s, t->body());
}

std::vector<TypePtr> signature_variants(const TypePtr& sig) {
  std::vector<TypePtr> out;
  auto add = [&](const TypePtr& v) {
    if (!v || alpha_equal(v, sig)) return;
    for (auto& o : out)
      if (alpha_equal(o, v)) return;
    out.push_back(v);
  };
  add(float_prenex(sig));
  add(sink_binder(sig));
  add(flip_specificity(sig));
  return out;
}

struct Trial {
  Outcome outcome;
  std::string target;
};

// Folds per-target outcomes: the first counterexample wins, any Holds makes the program applicable.
struct Fold {
  Outcome acc;
  bool add(const std::string& target, const Outcome& o) {
    acc.inconclusive += o.inconclusive;
    if (o.verdict == Verdict::CounterexampleFound) {
      acc.verdict = o.verdict;
      acc.detail = target + ": " + o.detail;
      return true;
    }
    if (o.verdict == Verdict::Holds) acc.verdict = Verdict::Holds;
    return false;
  }
};

}  // namespace

PropertyVerdict check_property(PropertyId pid, FlavourConfig f, const Program& prog, const HarnessConfig& cfg) {
  PropertyVerdict v;
  v.property = pid;
  v.flavour = f;
  v.trials = 1;
  Fold fold;
  Checked orig = run_checker(prog, f);
  auto ty = [&](const Program& p) { return compare_types(orig, run_checker(p, f)); };
  auto rt = [&](const Program& p, const std::string& only = {}) {
    return compare_runtime(orig, run_checker(p, f), f, cfg, only);
  };
  auto transform = [&](TransformKind k, const std::string& target, TypePtr sig = nullptr, int n = 0) {
    return apply_transformation({k, target, sig, n}, prog);
  };

  switch (pid) {
    case PropertyId::P1:
    case PropertyId::P3:
      for (auto& d : prog.decls) {
        auto t = transform(TransformKind::LetInline, d.name);
        if (!t) continue;
        if (fold.add(d.name, pid == PropertyId::P1 ? ty(*t) : rt(*t))) break;
      }
      break;
    case PropertyId::P2: {
      std::vector<std::string> targets;
      for (auto& d : prog.decls) targets.push_back(d.name);
      if (prog.main) targets.push_back("main");
      for (auto& name : targets) {
        auto t = transform(TransformKind::LetExtract, name);
        if (t && fold.add(name, ty(*t))) break;
      }
      break;
    }
    case PropertyId::P4:
    case PropertyId::P4b:
    case PropertyId::P5: {
      if (!orig.ok()) break;
      for (auto& d : prog.decls) {
        if (d.sig) continue;
        if (pid == PropertyId::P4b && d.eqs.size() != 1) continue;
        auto inferred = orig.result->find(d.name);
        TypePtr sig;
        try {
          sig = parse_type(pretty(inferred->type));
        } catch (const ParseError&) {
          continue;
        }
        auto t = transform(TransformKind::AddInferredSignature, d.name, sig);
        if (!t) continue;
        if (fold.add(d.name, pid == PropertyId::P5 ? rt(*t) : ty(*t))) break;
      }
      break;
    }
    case PropertyId::P6:
      for (size_t k = 0; k < prog.decls.size() && fold.acc.verdict != Verdict::CounterexampleFound; ++k) {
        const Decl& d = prog.decls[k];
        if (!d.sig) continue;
        Program base = prog;
        base.decls.resize(k + 1);
        base.main = nullptr;
        Checked before = run_checker(base, f);
        if (!before.ok()) continue;
        for (auto& variant : signature_variants(d.sig)) {
          auto t = apply_transformation({TransformKind::SwapSignature, d.name, variant, 0}, base);
          if (!t) continue;
          auto o = compare_runtime(before, run_checker(*t, f), f, cfg, d.name);
          if (fold.add(d.name + " with signature " + pretty(variant), o)) break;
        }
      }
      break;
    case PropertyId::P7:
    case PropertyId::P8:
      for (auto& d : prog.decls) {
        auto t = transform(TransformKind::PatternInline, d.name);
        if (!t) continue;
        if (fold.add(d.name, pid == PropertyId::P7 ? ty(*t) : rt(*t))) break;
      }
      break;
    case PropertyId::P9:
      for (auto& d : prog.decls) {
        auto t = transform(TransformKind::PatternExtract, d.name);
        if (t && fold.add(d.name, ty(*t))) break;
      }
      break;
    case PropertyId::P10:
      for (auto& d : prog.decls) {
        auto t = transform(TransformKind::DuplicateEquation, d.name);
        if (t && fold.add(d.name, ty(*t))) break;
      }
      break;
    case PropertyId::P11:
    case PropertyId::P11b: {
      if (!orig.ok()) break;
      for (auto& d : prog.decls) {
        if (!simple_binding(d)) continue;
        auto type = orig.result->find(d.name)->type;
        if (pid == PropertyId::P11b && forall_in_domain(type)) continue;
        int n = numargs(f.depth, type);
        auto t = transform(TransformKind::EtaExpand, d.name, nullptr, n);
        if (t && fold.add(d.name + " (eta " + std::to_string(n) + ")", ty(*t))) break;
      }
      break;
    }
  }

  v.result = fold.acc.verdict;
  v.detail = fold.acc.detail;
  if (fold.acc.inconclusive > 0)
    v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(fold.acc.inconclusive) + " inconclusive probe(s)";
  if (v.result == Verdict::CounterexampleFound) v.reproducer = prog;
  return v;
}

// ---------------------------------------------------------------- matrix

const MatrixCell& Matrix::at(PropertyId p, const FlavourConfig& f) const {
  for (size_t i = 0; i < properties.size(); ++i) {
    if (properties[i] != p) continue;
    for (size_t j = 0; j < flavours.size(); ++j)
      if (flavours[j].depth == f.depth && flavours[j].eagerness == f.eagerness) return cells[i][j];
  }
  throw std::out_of_range("no matrix cell for " + to_string(p) + " / " + f.name());
}

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string write_reproducer(const std::string& dir, const PropertyVerdict& v) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  fs::path path = fs::path(dir) / (to_string(v.property) + "-" + v.flavour.name() + ".mplc");
  std::ofstream out(path);
  out << "-- " << to_string(v.property) << " under " << v.flavour.name() << ": " << one_line(v.detail) << "\n";
  out << "-- reproduce: mplc stability " << path.string() << " --property=" << to_string(v.property)
      << " --flavour=" << v.flavour.name() << "\n";
  out << pretty(*v.reproducer);
  return path.string();
}

}  // namespace

Matrix run_matrix(const std::vector<Program>& corpus, const MatrixOptions& opts) {
  Matrix m;
  m.flavours = opts.flavours;
  m.properties = opts.properties;
  std::vector<Program> programs = corpus;
  for (int i = 0; i < opts.random_trials; ++i)
    programs.push_back(generate_program(opts.seed + static_cast<uint64_t>(i), opts.size_bound));

  for (auto p : m.properties) {
    std::vector<MatrixCell> row;
    for (auto& f : m.flavours) {
      MatrixCell cell;
      cell.verdict.property = p;
      cell.verdict.flavour = f;
      cell.verdict.result = Verdict::Holds;
      for (auto& prog : programs) {
        auto v = check_property(p, f, prog, opts.harness);
        ++cell.verdict.trials;
        if (v.detail.find("inconclusive") != std::string::npos) ++cell.inconclusive;
        if (v.result == Verdict::NotApplicable) continue;
        ++cell.applicable;
        if (v.result != Verdict::CounterexampleFound) continue;
        if (cell.counterexamples++ == 0) {
          int trials = cell.verdict.trials;
          cell.verdict = v;
          cell.verdict.trials = trials;
        }
      }
      if (cell.counterexamples > 0 && !opts.reproducer_dir.empty())
        cell.verdict.reproducer_path = write_reproducer(opts.reproducer_dir, cell.verdict);
      cell.verdict.trials = static_cast<int>(programs.size());
      row.push_back(std::move(cell));
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

std::string format_matrix_text(const Matrix& m) {
  std::ostringstream os;
  const int w = 16;
  os << std::left << std::setw(10) << "property";
  for (auto& f : m.flavours) os << std::setw(w) << f.name();
  os << "\n";
  for (size_t i = 0; i < m.properties.size(); ++i) {
    os << std::setw(10) << to_string(m.properties[i]);
    for (auto& c : m.cells[i]) {
      std::string s = c.counterexamples > 0
                          ? "FAILS " + std::to_string(c.counterexamples) + "/" + std::to_string(c.applicable)
                          : "holds " + std::to_string(c.applicable) + "/" + std::to_string(c.verdict.trials);
      os << std::setw(w) << s;
    }
    os << "\n";
  }
  for (size_t i = 0; i < m.properties.size(); ++i)
    for (auto& c : m.cells[i]) {
      if (c.counterexamples > 0)
        os << "\n" << to_string(c.verdict.property) << " " << c.verdict.flavour.name() << ": "
           << one_line(c.verdict.detail) << (c.verdict.reproducer_path.empty() ? "" : "\n  -> " + c.verdict.reproducer_path);
      if (c.inconclusive > 0)
        os << "\n" << to_string(c.verdict.property) << " " << c.verdict.flavour.name() << ": " << c.inconclusive
           << " program(s) with inconclusive probes";
    }
  os << "\n";
  return os.str();
}

std::string format_matrix_tsv(const Matrix& m) {
  std::ostringstream os;
  for (size_t i = 0; i < m.properties.size(); ++i)
    for (size_t j = 0; j < m.flavours.size(); ++j) {
      auto& c = m.cells[i][j];
      auto& f = m.flavours[j];
      os << to_string(m.properties[i]) << "\t" << (f.deep() ? "deep" : "shallow") << "\t"
         << (f.eager() ? "eager" : "lazy") << "\t" << to_string(c.verdict.result) << "\t"
         << (c.verdict.reproducer_path.empty() ? "-" : c.verdict.reproducer_path) << "\n";
    }
  return os.str();
}

}  // namespace mplc
