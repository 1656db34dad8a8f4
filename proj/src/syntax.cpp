#include "mplc/syntax.hpp"

#include <sstream>

namespace mplc {

ExprPtr mk_app(Head h, std::vector<Arg> args, SrcPos pos) {
  Expr e;
  e.kind = Expr::Kind::App;
  e.head = std::move(h);
  e.args = std::move(args);
  e.pos = pos;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr mk_var(const std::string& x) { return mk_app(hvar(x)); }

ExprPtr mk_lam(const std::string& x, ExprPtr body) {
  Expr e;
  e.kind = Expr::Kind::Lam;
  e.var = x;
  e.body = std::move(body);
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr mk_tylam(const std::string& a, ExprPtr body) {
  Expr e;
  e.kind = Expr::Kind::TyLam;
  e.var = a;
  e.body = std::move(body);
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr mk_let(Decl d, ExprPtr body) {
  Expr e;
  e.kind = Expr::Kind::Let;
  e.decl = std::make_shared<const Decl>(std::move(d));
  e.body = std::move(body);
  return std::make_shared<const Expr>(std::move(e));
}

Head hvar(const std::string& x) { return Head{Head::Kind::Var, x}; }
Head hcon(const std::string& k) { return Head{Head::Kind::Con, k}; }
Head hinf(ExprPtr e) {
  Head h{Head::Kind::Inf};
  h.expr = std::move(e);
  return h;
}
Head hann(ExprPtr e, TypePtr t) {
  Head h{Head::Kind::Ann};
  h.expr = std::move(e);
  h.type = std::move(t);
  return h;
}
Head hlit(long long n) {
  Head h{Head::Kind::Lit};
  h.lit = n;
  return h;
}
Head hundefined() { return Head{Head::Kind::Undefined}; }
Head hseq() { return Head{Head::Kind::Seq}; }
Arg term_arg(ExprPtr e) { return Arg{std::move(e), nullptr}; }
Arg type_arg(TypePtr t) { return Arg{nullptr, std::move(t)}; }

ExprPtr apply_spine(ExprPtr f, std::vector<Arg> args) {
  if (args.empty()) return f;
  if (f->kind == Expr::Kind::App) {
    auto all = f->args;
    all.insert(all.end(), args.begin(), args.end());
    return mk_app(f->head, std::move(all), f->pos);
  }
  return mk_app(hinf(f), std::move(args), f->pos);
}

// ---------------------------------------------------------------- printing

namespace {

bool is_tuple(const Expr& e) {
  if (e.kind != Expr::Kind::App || e.head.kind != Head::Kind::Con || e.head.name != kPair) return false;
  if (e.args.size() != 2) return false;
  return !e.args[0].is_type() && !e.args[1].is_type();
}

std::string type_atom(const TypePtr& t) {
  bool atomic = t->kind == Type::Kind::Var || t->kind == Type::Kind::Meta ||
                (t->kind == Type::Kind::Con && (t->args.empty() || t->name == kPair));
  return atomic ? pretty(t) : "(" + pretty(t) + ")";
}

void print_expr(const ExprPtr& e, bool atomic, std::ostream& os);
void print_decl_items(const Decl& d, const std::string& sep, std::ostream& os);

void print_head(const Head& h, std::ostream& os) {
  switch (h.kind) {
    case Head::Kind::Var:
    case Head::Kind::Con:
      os << h.name;
      return;
    case Head::Kind::Lit:
      if (h.lit < 0)
        os << "(" << h.lit << ")";
      else
        os << h.lit;
      return;
    case Head::Kind::Undefined:
      os << "undefined";
      return;
    case Head::Kind::Seq:
      os << "seq";
      return;
    case Head::Kind::Ann:
      os << "(";
      print_expr(h.expr, false, os);
      os << " : " << pretty(h.type) << ")";
      return;
    case Head::Kind::Inf:
      os << "(";
      print_expr(h.expr, false, os);
      os << ")";
      return;
  }
}

void print_expr(const ExprPtr& e, bool atomic, std::ostream& os) {
  switch (e->kind) {
    case Expr::Kind::App: {
      if (is_tuple(*e)) {
        os << "(";
        print_expr(e->args[0].term, false, os);
        os << ", ";
        print_expr(e->args[1].term, false, os);
        os << ")";
        return;
      }
      bool parens = atomic && !e->args.empty();
      if (parens) os << "(";
      print_head(e->head, os);
      for (auto& a : e->args) {
        os << " ";
        if (a.is_type())
          os << "@" << type_atom(a.type);
        else
          print_expr(a.term, true, os);
      }
      if (parens) os << ")";
      return;
    }
    case Expr::Kind::Lam:
    case Expr::Kind::TyLam:
    case Expr::Kind::Let:
      if (atomic) os << "(";
      if (e->kind == Expr::Kind::Lam) {
        os << "\\" << e->var << " -> ";
      } else if (e->kind == Expr::Kind::TyLam) {
        os << "/\\" << e->var << " -> ";
      } else {
        os << "let { ";
        print_decl_items(*e->decl, "; ", os);
        os << " } in ";
      }
      print_expr(e->body, false, os);
      if (atomic) os << ")";
      return;
  }
}

void print_pattern(const Pattern& p, bool atomic, std::ostream& os) {
  switch (p.kind) {
    case Pattern::Kind::Var:
      if (p.ann)
        os << "(" << p.name << " :: " << pretty(p.ann) << ")";
      else
        os << p.name;
      return;
    case Pattern::Kind::TyVar:
      os << "@" << p.name;
      return;
    case Pattern::Kind::Con:
      if (p.name == kPair && p.type_args.empty() && p.args.size() == 2) {
        os << "(";
        print_pattern(p.args[0], false, os);
        os << ", ";
        print_pattern(p.args[1], false, os);
        os << ")";
        return;
      }
      if (p.type_args.empty() && p.args.empty()) {
        os << p.name;
        return;
      }
      if (atomic) os << "(";
      os << p.name;
      for (auto& t : p.type_args) os << " @" << type_atom(t);
      for (auto& a : p.args) {
        os << " ";
        print_pattern(a, true, os);
      }
      if (atomic) os << ")";
      return;
  }
}

void print_decl_items(const Decl& d, const std::string& sep, std::ostream& os) {
  bool first = true;
  if (d.sig) {
    os << d.name << " : " << pretty(d.sig);
    first = false;
  }
  for (auto& eq : d.eqs) {
    if (!first) os << sep;
    first = false;
    if (d.strict) os << "!";
    os << d.name;
    for (auto& p : eq.pats) {
      os << " ";
      print_pattern(p, true, os);
    }
    os << " = ";
    print_expr(eq.rhs, false, os);
  }
}

}  // namespace

std::string pretty(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(e, false, os);
  return os.str();
}

std::string pretty(const Pattern& p) {
  std::ostringstream os;
  print_pattern(p, false, os);
  return os.str();
}

std::string pretty(const Decl& d) {
  std::ostringstream os;
  print_decl_items(d, "\n", os);
  return os.str();
}

std::string pretty(const Program& p) {
  std::ostringstream os;
  for (auto& d : p.data) {
    os << "data " << d.name;
    for (auto& a : d.params) os << " " << a;
    for (size_t i = 0; i < d.cons.size(); ++i) {
      os << (i == 0 ? " = " : " | ") << d.cons[i].name;
      for (auto& f : d.cons[i].fields) os << " " << type_atom(f);
    }
    os << "\n";
  }
  for (auto& d : p.decls) os << pretty(d) << "\n";
  if (p.main) os << "main = " << pretty(p.main) << "\n";
  return os.str();
}

// ---------------------------------------------------------------- equality

namespace {

bool type_eq(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return !a && !b;
  return alpha_equal(a, b);
}

bool head_equal(const Head& a, const Head& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Head::Kind::Var:
    case Head::Kind::Con:
      return a.name == b.name;
    case Head::Kind::Lit:
      return a.lit == b.lit;
    case Head::Kind::Undefined:
    case Head::Kind::Seq:
      return true;
    case Head::Kind::Ann:
      return type_eq(a.type, b.type) && expr_equal(a.expr, b.expr);
    case Head::Kind::Inf:
      return expr_equal(a.expr, b.expr);
  }
  return false;
}

}  // namespace

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::App:
      if (!head_equal(a->head, b->head) || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i) {
        auto &x = a->args[i], &y = b->args[i];
        if (x.is_type() != y.is_type()) return false;
        if (x.is_type() ? !type_eq(x.type, y.type) : !expr_equal(x.term, y.term)) return false;
      }
      return true;
    case Expr::Kind::Lam:
    case Expr::Kind::TyLam:
      return a->var == b->var && expr_equal(a->body, b->body);
    case Expr::Kind::Let:
      return decl_equal(*a->decl, *b->decl) && expr_equal(a->body, b->body);
  }
  return false;
}

bool pattern_equal(const Pattern& a, const Pattern& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (!type_eq(a.ann, b.ann)) return false;
  if (a.type_args.size() != b.type_args.size() || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.type_args.size(); ++i)
    if (!type_eq(a.type_args[i], b.type_args[i])) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!pattern_equal(a.args[i], b.args[i])) return false;
  return true;
}

bool decl_equal(const Decl& a, const Decl& b) {
  if (a.name != b.name || a.strict != b.strict || !type_eq(a.sig, b.sig)) return false;
  if (a.eqs.size() != b.eqs.size()) return false;
  for (size_t i = 0; i < a.eqs.size(); ++i) {
    auto &x = a.eqs[i], &y = b.eqs[i];
    if (x.pats.size() != y.pats.size()) return false;
    for (size_t j = 0; j < x.pats.size(); ++j)
      if (!pattern_equal(x.pats[j], y.pats[j])) return false;
    if (!expr_equal(x.rhs, y.rhs)) return false;
  }
  return true;
}

bool program_equal(const Program& a, const Program& b) {
  if (a.data.size() != b.data.size() || a.decls.size() != b.decls.size()) return false;
  for (size_t i = 0; i < a.data.size(); ++i) {
    auto &x = a.data[i], &y = b.data[i];
    if (x.name != y.name || x.params != y.params || x.cons.size() != y.cons.size()) return false;
    for (size_t j = 0; j < x.cons.size(); ++j) {
      if (x.cons[j].name != y.cons[j].name || x.cons[j].fields.size() != y.cons[j].fields.size())
        return false;
      for (size_t k = 0; k < x.cons[j].fields.size(); ++k)
        if (!type_eq(x.cons[j].fields[k], y.cons[j].fields[k])) return false;
    }
  }
  for (size_t i = 0; i < a.decls.size(); ++i)
    if (!decl_equal(a.decls[i], b.decls[i])) return false;
  if (!a.main || !b.main) return !a.main && !b.main;
  return expr_equal(a.main, b.main);
}

}  // namespace mplc
