#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mplc/core.hpp"
#include "mplc/syntax.hpp"

namespace mplc {

enum class Depth { Deep, Shallow };
enum class Eagerness { Eager, Lazy };

struct FlavourConfig {
  Depth depth = Depth::Shallow;
  Eagerness eagerness = Eagerness::Lazy;

  bool deep() const { return depth == Depth::Deep; }
  bool eager() const { return eagerness == Eagerness::Eager; }
  // "eager-deep", "lazy-shallow", ...
  std::string name() const;
  static std::optional<FlavourConfig> parse(const std::string& s);
  static std::vector<FlavourConfig> all();
};

enum class ErrorKind {
  UnboundVariable,
  UnboundConstructor,
  UnboundTypeVariable,
  UnknownTypeConstructor,
  OccursCheck,
  ConstructorMismatch,
  ImpredicativeInstantiation,
  SkolemEscape,
  TypeApplicationError,
  TooManyArguments,
  SpecificityMismatch,
  ArityMismatch,
  EquationTypeMismatch,
};

std::string to_string(ErrorKind k);

class TypeError : public std::runtime_error {
 public:
  TypeError(ErrorKind kind, std::string rule, std::string message, SrcPos pos = {});

  ErrorKind kind;
  std::string rule;
  std::string message;
  SrcPos pos;
};

struct BinderList {
  std::vector<std::pair<std::string, Specificity>> vars;
  TypePtr residual;
};

BinderList binders(Depth depth, const TypePtr& t);

struct InstResult {
  TypePtr residual;
  WrapperPtr wrapper;
  std::vector<TypePtr> args;  // the metas substituted for each binder, in order
};

struct SkolResult {
  TypePtr residual;
  TypingContext ctx;
  WrapperPtr wrapper;
};

// Argument descriptor produced by pattern synthesis: a monotype or a bound type variable.
struct PatDescriptor {
  bool is_type = false;
  std::string tyvar;
  TypePtr type;
};

TypePtr assemble_type(const std::vector<PatDescriptor>& ps, const TypePtr& residual);

struct PatternResult {
  std::vector<PatDescriptor> descriptors;  // synthesis mode
  TypePtr residual;                        // checking mode
  TypingContext ctx;
  std::vector<CoreParam> params;
  std::vector<CorePattern> pats;  // one per term parameter
};

struct DeclResult {
  std::string name;
  TypePtr type;
  CorePtr core;
  bool strict = false;
};

struct ProgramResult {
  std::shared_ptr<const StaticContext> sigma;
  std::vector<DeclResult> decls;
  TypePtr main_type;  // null when the program has no main
  CorePtr main_core;

  const DeclResult* find(const std::string& name) const;
  // Closed core for decl i: earlier decls bound around its body.
  CorePtr closed_decl(size_t i) const;
  CorePtr closed_main() const;
};

// One checking run: owns the meta variable store.
class Checker {
 public:
  Checker(FlavourConfig cfg, std::shared_ptr<const StaticContext> sigma);

  const FlavourConfig& config() const { return cfg_; }
  TypingContext empty_context() const;

  TypePtr fresh_meta();
  TypePtr zonk(const TypePtr& t) const;
  // Zonks every annotation and defaults leftover metas to ().
  CorePtr finalize(const CorePtr& e) const;

  void unify(const TypePtr& a, const TypePtr& b);
  InstResult instantiate(const TypePtr& t);
  SkolResult skolemise(const TypingContext& ctx, const TypePtr& t, Depth depth);
  // Resolves user-written type variables; unbound ones are quantified when `implicit`.
  TypePtr resolve_type(const TypingContext& ctx, const TypePtr& t, bool implicit);

  std::pair<TypePtr, CorePtr> synthesise(const TypingContext& ctx, const ExprPtr& e);
  CorePtr check(const TypingContext& ctx, const ExprPtr& e, const TypePtr& expected);
  std::pair<TypePtr, CorePtr> synthesise_head(const TypingContext& ctx, const Head& h);
  std::pair<TypePtr, CorePtr> check_args(const TypingContext& ctx, const std::vector<Arg>& args,
                                         const TypePtr& fun, CorePtr core);

  PatternResult check_patterns_synth(const TypingContext& ctx, const std::vector<Pattern>& ps,
                                     const std::vector<PatDescriptor>* reuse = nullptr);
  PatternResult check_patterns_check(const TypingContext& ctx, const std::vector<Pattern>& ps,
                                     const TypePtr& against, std::vector<std::string>* skolems = nullptr);

  struct DeclOutcome {
    TypingContext ctx;
    TypePtr type;
    CorePtr core;
  };
  DeclOutcome check_decl(const TypingContext& ctx, const Decl& d);

  // Quantifies metas above the current level as Inferred binders; returns the binder names.
  std::pair<TypePtr, std::vector<std::string>> generalise(const TypePtr& t);

  ProgramResult check_program(const Program& p);

 private:
  struct MetaInfo {
    TypePtr solution;
    int level;
  };
  struct LevelScope {
    explicit LevelScope(Checker& c) : c(c) { ++c.level_; }
    ~LevelScope() { --c.level_; }
    Checker& c;
  };

  [[noreturn]] void fail(ErrorKind k, const std::string& rule, const std::string& msg) const;
  void solve(int meta, const TypePtr& t);
  void unify_rec(const TypePtr& a, const TypePtr& b);
  void lower_levels(const TypePtr& t, int level);
  InstResult inst_rec(const TypePtr& t, bool deep);
  std::string new_skolem(const std::string& hint);
  TypePtr check_pattern(const TypingContext& ctx, const Pattern& p, const TypePtr& t, TypingContext& out,
                        CorePattern& core);
  CorePtr elaborate_let(const Decl& d, const DeclOutcome& dr, const CorePtr& body, const TypePtr& body_type);

  FlavourConfig cfg_;
  std::shared_ptr<const StaticContext> sigma_;
  std::vector<MetaInfo> metas_;
  std::map<std::string, int> skolem_level_;
  int level_ = 0;
  SrcPos pos_;
};

ProgramResult check_program(const Program& p, FlavourConfig cfg);

}  // namespace mplc
