#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mplc {

enum class Specificity { Specified, Inferred };

struct SrcPos {
  int line = 0;
  int col = 0;
};

// ---------------------------------------------------------------- types

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  enum class Kind { Var, Meta, Arrow, Con, Forall };
  Kind kind;
  std::string name;                 // Var, Con, Forall binder
  int meta = -1;                    // Meta id (owned by a checker run)
  Specificity spec = Specificity::Specified;
  std::vector<TypePtr> args;        // Arrow {dom, cod}; Con args; Forall {body}

  bool is(Kind k) const { return kind == k; }
  const TypePtr& dom() const { return args[0]; }
  const TypePtr& cod() const { return args[1]; }
  const TypePtr& body() const { return args[0]; }
};

TypePtr tvar(std::string name);
TypePtr tmeta(int id);
TypePtr tarrow(TypePtr dom, TypePtr cod);
TypePtr tcon(std::string name, std::vector<TypePtr> args = {});
TypePtr tforall(std::string binder, Specificity spec, TypePtr body);
TypePtr tforalls(const std::vector<std::pair<std::string, Specificity>>& bs, TypePtr body);
TypePtr tint();
TypePtr tunit();
TypePtr tbool();
TypePtr tpair(TypePtr a, TypePtr b);

inline const char* kUnit = "()";
inline const char* kPair = "(,)";

// Fresh names carry a '#N' suffix which the printer strips when unambiguous.
std::string fresh_name(const std::string& hint);
std::string base_name(const std::string& name);

using TypeSubst = std::map<std::string, TypePtr>;

TypePtr substitute_type(const TypeSubst& s, const TypePtr& t);
std::vector<std::string> free_type_vars(const TypePtr& t);
std::vector<int> free_metas(const TypePtr& t);
bool occurs_var(const std::string& v, const TypePtr& t);

// Specificity-sensitive unless told otherwise. Metas compare by id.
bool alpha_equal(const TypePtr& a, const TypePtr& b, bool check_specificity = true);

bool is_monotype(const TypePtr& t);
bool has_forall(const TypePtr& t);
// No top-level forall; under deep also none reachable through arrow codomains.
bool is_instantiated(const TypePtr& t, bool deep);

std::string pretty(const TypePtr& t);

// ---------------------------------------------------------------- terms

struct Expr;
struct Decl;
using ExprPtr = std::shared_ptr<const Expr>;
using DeclPtr = std::shared_ptr<const Decl>;

struct Head {
  enum class Kind { Var, Con, Ann, Inf, Undefined, Seq, Lit };
  Kind kind = Kind::Var;
  std::string name;     // Var, Con
  long long lit = 0;    // Lit
  ExprPtr expr;         // Ann, Inf
  TypePtr type;         // Ann
};

struct Arg {
  ExprPtr term;  // exactly one of term / type is set
  TypePtr type;
  bool is_type() const { return type != nullptr; }
};

struct Expr {
  enum class Kind { App, Lam, TyLam, Let };
  Kind kind = Kind::App;
  Head head;                 // App
  std::vector<Arg> args;     // App
  std::string var;           // Lam, TyLam
  ExprPtr body;              // Lam, TyLam, Let
  DeclPtr decl;              // Let
  SrcPos pos;
};

struct Pattern {
  enum class Kind { Var, TyVar, Con };
  Kind kind = Kind::Var;
  std::string name;                 // variable, type variable or constructor
  TypePtr ann;                      // Var: optional (x :: σ)
  std::vector<TypePtr> type_args;   // Con: leading @σ sub-patterns
  std::vector<Pattern> args;        // Con: term sub-patterns
};

struct Equation {
  std::vector<Pattern> pats;
  ExprPtr rhs;
};

struct Decl {
  std::string name;
  TypePtr sig;                   // may be null
  std::vector<Equation> eqs;
  bool strict = false;           // `!x = e`, forces x before the body
  SrcPos pos;
};

struct DataCon {
  std::string name;
  std::vector<TypePtr> fields;
};

struct DataDecl {
  std::string name;
  std::vector<std::string> params;
  std::vector<DataCon> cons;
};

struct Program {
  std::vector<DataDecl> data;
  std::vector<Decl> decls;
  ExprPtr main;                  // may be null
};

ExprPtr mk_app(Head h, std::vector<Arg> args = {}, SrcPos pos = {});
ExprPtr mk_var(const std::string& x);
ExprPtr mk_lam(const std::string& x, ExprPtr body);
ExprPtr mk_tylam(const std::string& a, ExprPtr body);
ExprPtr mk_let(Decl d, ExprPtr body);
Head hvar(const std::string& x);
Head hcon(const std::string& k);
Head hinf(ExprPtr e);
Head hann(ExprPtr e, TypePtr t);
Head hlit(long long n);
Head hundefined();
Head hseq();
Arg term_arg(ExprPtr e);
Arg type_arg(TypePtr t);

// Builds h args, merging into h when h is itself a spine (spines stay flat).
ExprPtr apply_spine(ExprPtr f, std::vector<Arg> args);

std::string pretty(const ExprPtr& e);
std::string pretty(const Pattern& p);
std::string pretty(const Decl& d);
std::string pretty(const Program& p);

// Structural equality; embedded types compared with alpha_equal.
bool expr_equal(const ExprPtr& a, const ExprPtr& b);
bool pattern_equal(const Pattern& a, const Pattern& b);
bool decl_equal(const Decl& a, const Decl& b);
bool program_equal(const Program& a, const Program& b);

// ---------------------------------------------------------------- contexts

struct ConInfo {
  std::vector<std::string> params;  // quantified, Specified
  std::vector<TypePtr> fields;
  std::string result;               // type constructor
  TypePtr scheme;                   // ∀params. fields -> T params
};

struct StaticContext {
  std::map<std::string, int> tycons;
  std::map<std::string, ConInfo> cons;
  std::map<std::string, std::vector<std::string>> cons_of;  // tycon -> ctors in order

  static StaticContext builtin();
  void add_data(const DataDecl& d);  // throws std::runtime_error on bad decl
  const ConInfo* con(const std::string& k) const;
};

struct CtxEntry {
  enum class Kind { Term, TyVar };
  Kind kind;
  std::string name;                  // term name, or internal type variable
  TypePtr type;                      // Term
  std::optional<std::string> source; // TyVar: name as written by the user
  int level = 0;                     // TyVar: skolem level
};

class TypingContext {
 public:
  explicit TypingContext(std::shared_ptr<const StaticContext> base);

  const StaticContext& base() const { return *base_; }
  std::shared_ptr<const StaticContext> base_ptr() const { return base_; }

  TypingContext with_term(const std::string& x, TypePtr t) const;
  TypingContext with_tyvar(const std::string& internal, std::optional<std::string> source,
                           int level = 0) const;

  const CtxEntry* lookup_term(const std::string& x) const;
  // Resolves a user-written type variable to its internal name.
  const CtxEntry* lookup_source_tyvar(const std::string& source) const;
  bool has_tyvar(const std::string& internal) const;
  std::vector<CtxEntry> entries() const;  // oldest first

 private:
  struct Node {
    CtxEntry entry;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const StaticContext> base_;
  std::shared_ptr<const Node> head_;
};

}  // namespace mplc
