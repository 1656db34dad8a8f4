#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "mplc/parser.hpp"
#include "mplc/syntax.hpp"
#include "mplc/typecheck.hpp"

namespace mplc::test {

inline std::string corpus_path(const std::string& name) { return std::string(MPLC_CORPUS_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program corpus(const std::string& name) { return parse_program(slurp(corpus_path(name))); }

inline FlavourConfig flavour(const std::string& s) { return *FlavourConfig::parse(s); }

// Type of `name` after checking `prog`, pretty printed; "rejected" on a type error.
inline std::string inferred(const Program& prog, const std::string& name, FlavourConfig f) {
  try {
    auto r = check_program(prog, f);
    auto d = r.find(name);
    return d ? pretty(d->type) : "missing";
  } catch (const TypeError&) {
    return "rejected";
  }
}

// Random surface types over a small vocabulary, with both kinds of binder.
class TypeGen {
 public:
  explicit TypeGen(uint64_t seed) : rng_(seed) {}

  TypePtr operator()(int depth, std::vector<std::string> scope = {}) {
    int pick = depth <= 0 ? roll(3) : roll(8);
    switch (pick) {
      case 0: {
        static const char* frees[] = {"a", "b", "c"};
        if (!scope.empty() && roll(2) == 0) return tvar(scope[roll(scope.size())]);
        return tvar(frees[roll(3)]);
      }
      case 1:
        return roll(2) ? tint() : tbool();
      case 2:
        return tunit();
      case 3:
      case 4:
        return tarrow((*this)(depth - 1, scope), (*this)(depth - 1, scope));
      case 5:
        return tpair((*this)(depth - 1, scope), (*this)(depth - 1, scope));
      default: {
        static const char* binders[] = {"a", "b", "x", "y"};
        std::string v = binders[roll(4)];
        auto spec = roll(3) == 0 ? Specificity::Inferred : Specificity::Specified;
        scope.push_back(v);
        return tforall(v, spec, (*this)(depth - 1, scope));
      }
    }
  }

  size_t roll(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace mplc::test
