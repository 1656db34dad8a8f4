#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mplc/core.hpp"
#include "mplc/parser.hpp"
#include "mplc/stability.hpp"
#include "mplc/typecheck.hpp"

namespace fs = std::filesystem;
using namespace mplc;

namespace {

enum Exit { kOk = 0, kTypeError = 1, kParseError = 2, kInternal = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Options {
  std::string depth = "shallow";
  std::string eagerness = "lazy";
  std::string flavour;
  long fuel = kDefaultFuel;
  uint64_t seed = 0;
  int trials = 0;
  std::string format = "text";
  std::string file;
  std::vector<std::string> files;
  std::string name;
  std::string property;
  std::string corpus;
  std::string out_dir = "counterexamples";
  bool flavour_given = false;
};

FlavourConfig flavour_of(const Options& o) {
  if (!o.flavour.empty()) {
    auto f = FlavourConfig::parse(o.flavour);
    if (!f) throw CLI::ValidationError("--flavour", "unknown flavour " + o.flavour);
    return *f;
  }
  FlavourConfig f;
  f.depth = o.depth == "deep" ? Depth::Deep : Depth::Shallow;
  f.eagerness = o.eagerness == "eager" ? Eagerness::Eager : Eagerness::Lazy;
  return f;
}

long fuel_of(const Options& o) {
  if (const char* env = std::getenv("MPLC_FUEL")) {
    try {
      return std::stol(env);
    } catch (...) {
      std::cerr << "warning: ignoring malformed MPLC_FUEL\n";
    }
  }
  return o.fuel;
}

Program load(const std::string& path) { return parse_program(read_file(path)); }

int cmd_check(const Options& o) {
  auto prog = load(o.file);
  auto r = check_program(prog, flavour_of(o));
  for (auto& d : r.decls) std::cout << d.name << " : " << pretty(d.type) << "\n";
  if (r.main_type) std::cout << "main : " << pretty(r.main_type) << "\n";
  return kOk;
}

int cmd_infer(const Options& o) {
  auto prog = load(o.file);
  auto r = check_program(prog, flavour_of(o));
  auto d = r.find(o.name);
  if (!d) {
    std::cerr << "error: no declaration named " << o.name << "\n";
    return kTypeError;
  }
  std::cout << pretty(d->type) << "\n";
  return kOk;
}

int cmd_core(const Options& o) {
  auto prog = load(o.file);
  auto r = check_program(prog, flavour_of(o));
  for (auto& d : r.decls) std::cout << d.name << " : " << pretty(d.type) << "\n  = " << pretty(d.core) << "\n";
  if (r.main_core) std::cout << "main : " << pretty(r.main_type) << "\n  = " << pretty(r.main_core) << "\n";
  return kOk;
}

int cmd_eval(const Options& o) {
  auto prog = load(o.file);
  auto r = check_program(prog, flavour_of(o));
  CorePtr e;
  TypePtr t;
  if (!o.name.empty()) {
    for (size_t i = 0; i < r.decls.size(); ++i)
      if (r.decls[i].name == o.name) {
        e = r.closed_decl(i);
        t = r.decls[i].type;
      }
    if (!e) {
      std::cerr << "error: no declaration named " << o.name << "\n";
      return kTypeError;
    }
  } else {
    e = r.closed_main();
    t = r.main_type;
    if (!e) {
      std::cerr << "error: program has no main\n";
      return kTypeError;
    }
  }
  core_typecheck(TypingContext(r.sigma), e);
  long fuel = fuel_of(o);
  auto out = evaluate(e, fuel, *r.sigma);
  switch (out.kind) {
    case EvalOutcome::Kind::Value:
      std::cout << "Value: " << describe_value(out.value, fuel, *r.sigma) << "\n";
      return kOk;
    case EvalOutcome::Kind::FuelExhausted:
      std::cout << "presumed divergent (fuel=" << fuel << ")\n";
      return kOk;
    case EvalOutcome::Kind::Stuck:
      std::cerr << "internal error: evaluation stuck: " << out.why << "\n";
      return kInternal;
  }
  return kInternal;
}

std::vector<std::string> corpus_files(const Options& o) {
  std::vector<std::string> files = o.files;
  std::string dir = o.corpus;
#ifdef MPLC_CORPUS_DIR
  if (dir.empty() && files.empty()) dir = MPLC_CORPUS_DIR;
#endif
  if (!dir.empty()) {
    std::vector<std::string> found;
    for (auto& ent : fs::directory_iterator(dir))
      if (ent.path().extension() == ".mplc") found.push_back(ent.path().string());
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  }
  return files;
}

int cmd_stability(const Options& o) {
  MatrixOptions mo;
  mo.random_trials = o.trials;
  mo.seed = o.seed;
  mo.reproducer_dir = o.out_dir;
  mo.harness.fuel = fuel_of(o);
  if (!o.property.empty()) {
    auto p = parse_property(o.property);
    if (!p) throw CLI::ValidationError("--property", "unknown property " + o.property);
    mo.properties = {*p};
  }
  if (o.flavour_given) mo.flavours = {flavour_of(o)};
  std::vector<Program> corpus;
  for (auto& f : corpus_files(o)) corpus.push_back(load(f));
  auto m = run_matrix(corpus, mo);
  std::cout << (o.format == "tsv" ? format_matrix_tsv(m) : format_matrix_text(m));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mplc: mixed polymorphic lambda calculus checker"};
  app.require_subcommand(1);
  Options o;

  auto flavour_flags = [&](CLI::App* c) {
    c->add_option("--depth", o.depth, "instantiation depth")->check(CLI::IsMember({"deep", "shallow"}));
    c->add_option("--eagerness", o.eagerness, "instantiation eagerness")->check(CLI::IsMember({"eager", "lazy"}));
    c->add_option("--flavour", o.flavour, "shorthand such as eager-deep");
    c->add_option("--fuel", o.fuel, "evaluation fuel (MPLC_FUEL overrides)");
  };

  auto check = app.add_subcommand("check", "print inferred types of all declarations");
  flavour_flags(check);
  check->add_option("file", o.file)->required();

  auto infer = app.add_subcommand("infer", "print the inferred type of one declaration");
  flavour_flags(infer);
  infer->add_option("file", o.file)->required();
  infer->add_option("name", o.name)->required();

  auto eval = app.add_subcommand("eval", "evaluate main (or --decl NAME)");
  flavour_flags(eval);
  eval->add_option("file", o.file)->required();
  eval->add_option("--decl", o.name, "evaluate this declaration instead of main");

  auto core = app.add_subcommand("core", "dump elaborated core");
  flavour_flags(core);
  core->add_option("file", o.file)->required();

  auto stab = app.add_subcommand("stability", "run the property matrix");
  flavour_flags(stab);
  stab->add_option("files", o.files, "programs to test (default: the bundled corpus)");
  stab->add_option("--corpus", o.corpus, "directory of .mplc programs");
  stab->add_option("--property", o.property, "restrict to one property, e.g. P4b");
  stab->add_option("--trials", o.trials, "random programs per cell");
  stab->add_option("--seed", o.seed, "generator seed");
  stab->add_option("--format", o.format)->check(CLI::IsMember({"text", "tsv"}));
  stab->add_option("--out", o.out_dir, "reproducer directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParseError;
  }
  for (auto* sub : app.get_subcommands())
    o.flavour_given = sub->count("--flavour") + sub->count("--depth") + sub->count("--eagerness") > 0;

  try {
    if (*check) return cmd_check(o);
    if (*infer) return cmd_infer(o);
    if (*eval) return cmd_eval(o);
    if (*core) return cmd_core(o);
    if (*stab) return cmd_stability(o);
  } catch (const ParseError& e) {
    std::cerr << (o.file.empty() ? "" : o.file + ":") << e.what() << "\n";
    return kParseError;
  } catch (const TypeError& e) {
    std::cerr << (o.file.empty() ? "" : o.file + ":") << e.pos.line << ":" << e.pos.col
              << ": type error: " << e.what() << "\n";
    return kTypeError;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
