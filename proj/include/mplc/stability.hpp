#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mplc/core.hpp"
#include "mplc/syntax.hpp"
#include "mplc/typecheck.hpp"

namespace mplc {

enum class PropertyId { P1, P2, P3, P4, P4b, P5, P6, P7, P8, P9, P10, P11, P11b };

std::string to_string(PropertyId p);
std::optional<PropertyId> parse_property(const std::string& s);  // "P4b", "4b", "p4b"
const std::vector<PropertyId>& all_properties();
bool is_runtime_property(PropertyId p);

// ---------------------------------------------------------------- helpers

// PVar x -> \x, PTyVar a -> /\a; nullopt for constructor or annotated patterns.
std::optional<ExprPtr> wrap_patterns(const std::vector<Pattern>& ps, const ExprPtr& rhs);
std::pair<std::vector<Pattern>, ExprPtr> unwrap_lambdas(const ExprPtr& e);
int numargs(Depth depth, const TypePtr& t);

// ---------------------------------------------------------------- transformations

enum class TransformKind {
  LetInline,
  LetExtract,
  AddInferredSignature,
  SwapSignature,
  PatternInline,
  PatternExtract,
  DuplicateEquation,
  EtaExpand,
};

struct Transformation {
  TransformKind kind;
  std::string target;  // decl name
  TypePtr signature;   // AddInferredSignature, SwapSignature
  int n = 0;           // EtaExpand
};

// nullopt when the transformation does not apply.
std::optional<Program> apply_transformation(const Transformation& t, const Program& p);

// ---------------------------------------------------------------- properties

enum class Verdict { Holds, CounterexampleFound, NotApplicable };
std::string to_string(Verdict v);

struct PropertyVerdict {
  PropertyId property;
  FlavourConfig flavour;
  Verdict result = Verdict::NotApplicable;
  std::string detail;
  std::optional<Program> reproducer;
  int trials = 0;
  std::string reproducer_path;
};

struct HarnessConfig {
  ProbeConfig probe;  // `deep` is set per flavour
  long fuel = kDefaultFuel;
};

PropertyVerdict check_property(PropertyId p, FlavourConfig f, const Program& prog, const HarnessConfig& cfg = {});

struct MatrixCell {
  PropertyVerdict verdict;
  int counterexamples = 0;
  int applicable = 0;
  int inconclusive = 0;
};

struct Matrix {
  std::vector<FlavourConfig> flavours;
  std::vector<PropertyId> properties;
  std::vector<std::vector<MatrixCell>> cells;  // [property][flavour]

  const MatrixCell& at(PropertyId p, const FlavourConfig& f) const;
};

struct MatrixOptions {
  int random_trials = 0;
  uint64_t seed = 0;
  int size_bound = 6;
  std::string reproducer_dir;  // empty: do not write reproducers
  HarnessConfig harness;
  std::vector<PropertyId> properties = all_properties();
  std::vector<FlavourConfig> flavours = FlavourConfig::all();
};

Matrix run_matrix(const std::vector<Program>& corpus, const MatrixOptions& opts);

std::string format_matrix_text(const Matrix& m);
std::string format_matrix_tsv(const Matrix& m);

// ---------------------------------------------------------------- generators

Program generate_program(uint64_t seed, int size_bound);

struct GeneratedCore {
  CorePtr term;
  TypePtr type;
};
GeneratedCore generate_core(uint64_t seed, int size_bound);

}  // namespace mplc
