#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mplc/syntax.hpp"

namespace mplc {

struct CoreExpr;
using CorePtr = std::shared_ptr<const CoreExpr>;

struct CorePattern {
  enum class Kind { Var, Con };
  Kind kind = Kind::Var;
  std::string name;                 // binder or constructor
  std::vector<TypePtr> type_args;   // Con: instantiation of the constructor's quantifiers
  std::vector<CorePattern> args;    // Con
};

struct CoreParam {
  bool is_type = false;
  std::string tyvar;  // type parameter, shared by all alternatives
  TypePtr type;       // term parameter
};

struct CoreAlt {
  std::vector<CorePattern> pats;  // one per term parameter
  CorePtr body;
};

struct CoreExpr {
  enum class Kind { Var, Con, Lit, Lam, App, TyLam, TyApp, CaseLam, Undefined, Seq };
  Kind kind;
  std::string name;              // Var, Con, Lam binder, TyLam binder
  long long lit = 0;
  TypePtr type;                  // Lam binder type, TyApp argument, Undefined type, CaseLam result
  CorePtr a;                     // Lam/TyLam body, App/TyApp function
  CorePtr b;                     // App argument
  std::vector<CoreParam> params; // CaseLam
  std::vector<CoreAlt> alts;     // CaseLam
};

CorePtr cvar(const std::string& x);
CorePtr ccon(const std::string& k);
CorePtr clit(long long n);
CorePtr clam(const std::string& x, TypePtr t, CorePtr body);
CorePtr capp(CorePtr f, CorePtr a);
CorePtr ctylam(const std::string& a, CorePtr body);
CorePtr ctyapp(CorePtr f, TypePtr t);
CorePtr ccaselam(std::vector<CoreParam> params, TypePtr result, std::vector<CoreAlt> alts);
CorePtr cundefined(TypePtr t);
CorePtr cseq();
// (λx:σ. body) rhs
CorePtr clet(const std::string& x, TypePtr t, CorePtr rhs, CorePtr body);

struct CoreWrapper;
using WrapperPtr = std::shared_ptr<const CoreWrapper>;

struct CoreWrapper {
  enum class Kind { Identity, ApplyType, EtaExpand, TyAbstract, Compose };
  Kind kind = Kind::Identity;
  TypePtr type;         // ApplyType argument, EtaExpand binder type
  std::string tyvar;    // TyAbstract
  WrapperPtr outer;     // Compose
  WrapperPtr inner;     // Compose, EtaExpand
};

WrapperPtr w_identity();
WrapperPtr w_apply_type(TypePtr t);
WrapperPtr w_eta(TypePtr arg, WrapperPtr inner);
WrapperPtr w_tyabs(const std::string& a);
// outer after inner; identities are dropped
WrapperPtr w_compose(WrapperPtr outer, WrapperPtr inner);
bool is_identity(const WrapperPtr& w);

CorePtr apply_wrapper(const WrapperPtr& w, const CorePtr& e);

// Applies fn to every type annotation in the term.
CorePtr map_types(const CorePtr& e, const std::function<TypePtr(const TypePtr&)>& fn);

std::string pretty(const CorePtr& e);
bool core_equal(const CorePtr& a, const CorePtr& b);

// ---------------------------------------------------------------- typing

class CoreTypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TypePtr core_typecheck(const TypingContext& ctx, const CorePtr& e);
// Type equality used by the core: α-equivalence ignoring specificity.
bool core_type_equal(const TypePtr& a, const TypePtr& b);

// ---------------------------------------------------------------- evaluation

struct StepResult {
  enum class Kind { Stepped, Value, Stuck };
  Kind kind;
  CorePtr next;
  std::string why;
  bool loops = false;  // next is e itself: evaluation cannot make progress
};

StepResult step(const CorePtr& e, const StaticContext& sigma);

struct EvalOutcome {
  enum class Kind { Value, FuelExhausted, Stuck };
  Kind kind;
  CorePtr value;
  long steps = 0;
  std::string why;
};

inline constexpr long kDefaultFuel = 10000;

EvalOutcome evaluate(const CorePtr& e, long fuel, const StaticContext& sigma);
// Erased shape of a value with data fields forced to a bounded depth.
std::string describe_value(const CorePtr& v, long fuel, const StaticContext& sigma);

// ---------------------------------------------------------------- equivalence

struct Equivalence {
  enum class Kind { Equivalent, Distinguished, Inconclusive };
  Kind kind;
  std::string detail;
};

struct ProbeConfig {
  bool deep = false;
  long fuel = 2000;
  int budget = 64;
};

Equivalence behaviorally_equivalent(const CorePtr& e1, const CorePtr& e2, const TypePtr& t1,
                                    const TypePtr& t2, const StaticContext& sigma,
                                    const ProbeConfig& cfg = {});

}  // namespace mplc
