#include "mplc/syntax.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mplc {

namespace {

TypePtr make(Type t) { return std::make_shared<const Type>(std::move(t)); }

std::atomic<long> g_fresh{0};

}  // namespace

TypePtr tvar(std::string name) {
  Type t{Type::Kind::Var};
  t.name = std::move(name);
  return make(std::move(t));
}

TypePtr tmeta(int id) {
  Type t{Type::Kind::Meta};
  t.meta = id;
  return make(std::move(t));
}

TypePtr tarrow(TypePtr dom, TypePtr cod) {
  Type t{Type::Kind::Arrow};
  t.args = {std::move(dom), std::move(cod)};
  return make(std::move(t));
}

TypePtr tcon(std::string name, std::vector<TypePtr> args) {
  Type t{Type::Kind::Con};
  t.name = std::move(name);
  t.args = std::move(args);
  return make(std::move(t));
}

TypePtr tforall(std::string binder, Specificity spec, TypePtr body) {
  Type t{Type::Kind::Forall};
  t.name = std::move(binder);
  t.spec = spec;
  t.args = {std::move(body)};
  return make(std::move(t));
}

TypePtr tforalls(const std::vector<std::pair<std::string, Specificity>>& bs, TypePtr body) {
  for (auto it = bs.rbegin(); it != bs.rend(); ++it) body = tforall(it->first, it->second, body);
  return body;
}

TypePtr tint() {
  static const TypePtr t = tcon("Int");
  return t;
}
TypePtr tunit() {
  static const TypePtr t = tcon(kUnit);
  return t;
}
TypePtr tbool() {
  static const TypePtr t = tcon("Bool");
  return t;
}
TypePtr tpair(TypePtr a, TypePtr b) { return tcon(kPair, {std::move(a), std::move(b)}); }

std::string fresh_name(const std::string& hint) {
  return base_name(hint) + "#" + std::to_string(++g_fresh);
}

std::string base_name(const std::string& name) {
  auto i = name.find('#');
  return i == std::string::npos ? name : name.substr(0, i);
}

// ---------------------------------------------------------------- traversal

namespace {

void collect_ftv(const TypePtr& t, std::vector<std::string>& bound, std::vector<std::string>& out) {
  switch (t->kind) {
    case Type::Kind::Var:
      if (std::find(bound.begin(), bound.end(), t->name) == bound.end() &&
          std::find(out.begin(), out.end(), t->name) == out.end())
        out.push_back(t->name);
      return;
    case Type::Kind::Meta:
      return;
    case Type::Kind::Forall:
      bound.push_back(t->name);
      collect_ftv(t->body(), bound, out);
      bound.pop_back();
      return;
    default:
      for (auto& a : t->args) collect_ftv(a, bound, out);
  }
}

void collect_metas(const TypePtr& t, std::vector<int>& out) {
  if (t->kind == Type::Kind::Meta) {
    if (std::find(out.begin(), out.end(), t->meta) == out.end()) out.push_back(t->meta);
    return;
  }
  for (auto& a : t->args) collect_metas(a, out);
}

}  // namespace

std::vector<std::string> free_type_vars(const TypePtr& t) {
  std::vector<std::string> bound, out;
  collect_ftv(t, bound, out);
  return out;
}

std::vector<int> free_metas(const TypePtr& t) {
  std::vector<int> out;
  collect_metas(t, out);
  return out;
}

bool occurs_var(const std::string& v, const TypePtr& t) {
  auto fv = free_type_vars(t);
  return std::find(fv.begin(), fv.end(), v) != fv.end();
}

TypePtr substitute_type(const TypeSubst& s, const TypePtr& t) {
  if (s.empty()) return t;
  switch (t->kind) {
    case Type::Kind::Var: {
      auto it = s.find(t->name);
      return it == s.end() ? t : it->second;
    }
    case Type::Kind::Meta:
      return t;
    case Type::Kind::Forall: {
      TypeSubst inner = s;
      inner.erase(t->name);
      if (inner.empty()) return t;
      auto body_fv = free_type_vars(t->body());
      bool capture = false;
      for (auto& [k, v] : inner) {
        if (std::find(body_fv.begin(), body_fv.end(), k) == body_fv.end()) continue;
        if (occurs_var(t->name, v)) {
          capture = true;
          break;
        }
      }
      std::string b = t->name;
      if (capture) {
        b = fresh_name(t->name);
        inner[t->name] = tvar(b);
      }
      auto body = substitute_type(inner, t->body());
      if (!capture && body == t->body()) return t;
      return tforall(b, t->spec, body);
    }
    default: {
      std::vector<TypePtr> args;
      bool changed = false;
      for (auto& a : t->args) {
        args.push_back(substitute_type(s, a));
        changed |= args.back() != a;
      }
      if (!changed) return t;
      Type c = *t;
      c.args = std::move(args);
      return std::make_shared<const Type>(std::move(c));
    }
  }
}

// ---------------------------------------------------------------- equality

namespace {

using Env = std::vector<std::pair<std::string, std::string>>;

bool aeq(const TypePtr& a, const TypePtr& b, Env& env, bool spec) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Type::Kind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool l = it->first == a->name, r = it->second == b->name;
        if (l || r) return l && r;
      }
      return a->name == b->name;
    }
    case Type::Kind::Meta:
      return a->meta == b->meta;
    case Type::Kind::Forall: {
      if (spec && a->spec != b->spec) return false;
      env.emplace_back(a->name, b->name);
      bool r = aeq(a->body(), b->body(), env, spec);
      env.pop_back();
      return r;
    }
    case Type::Kind::Con:
      if (a->name != b->name) return false;
      [[fallthrough]];
    case Type::Kind::Arrow:
      if (a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!aeq(a->args[i], b->args[i], env, spec)) return false;
      return true;
  }
  return false;
}

}  // namespace

bool alpha_equal(const TypePtr& a, const TypePtr& b, bool check_specificity) {
  Env env;
  return aeq(a, b, env, check_specificity);
}

bool has_forall(const TypePtr& t) {
  if (t->kind == Type::Kind::Forall) return true;
  for (auto& a : t->args)
    if (has_forall(a)) return true;
  return false;
}

bool is_monotype(const TypePtr& t) { return !has_forall(t); }

bool is_instantiated(const TypePtr& t, bool deep) {
  if (t->kind == Type::Kind::Forall) return false;
  if (deep && t->kind == Type::Kind::Arrow) return is_instantiated(t->cod(), true);
  return true;
}

// ---------------------------------------------------------------- printing

namespace {

struct Printer {
  std::unordered_map<std::string, std::string> display;
  std::unordered_set<std::string> used;

  void scan(const TypePtr& t, std::vector<std::string>& order) {
    if (t->kind == Type::Kind::Var || t->kind == Type::Kind::Forall) {
      if (std::find(order.begin(), order.end(), t->name) == order.end()) order.push_back(t->name);
    }
    for (auto& a : t->args) scan(a, order);
  }

  explicit Printer(const TypePtr& t) {
    std::vector<std::string> order;
    scan(t, order);
    for (auto& n : order)
      if (n.find('#') == std::string::npos) used.insert(n), display[n] = n;
    for (auto& n : order) {
      if (display.count(n)) continue;
      std::string b = base_name(n), c = b;
      for (int i = 1; used.count(c); ++i) c = b + std::to_string(i);
      used.insert(c);
      display[n] = c;
    }
  }

  std::string name(const std::string& n) const {
    auto it = display.find(n);
    return it == display.end() ? n : it->second;
  }

  // prec 0: anything, 1: arrow domain, 2: type-constructor argument
  void go(const TypePtr& t, int prec, std::ostream& os) const {
    switch (t->kind) {
      case Type::Kind::Var:
        os << name(t->name);
        return;
      case Type::Kind::Meta:
        os << "?" << t->meta;
        return;
      case Type::Kind::Forall: {
        if (prec > 0) os << "(";
        os << "forall";
        TypePtr cur = t;
        while (cur->kind == Type::Kind::Forall) {
          if (cur->spec == Specificity::Inferred)
            os << " {" << name(cur->name) << "}";
          else
            os << " " << name(cur->name);
          cur = cur->body();
        }
        os << ". ";
        go(cur, 0, os);
        if (prec > 0) os << ")";
        return;
      }
      case Type::Kind::Arrow:
        if (prec > 0) os << "(";
        go(t->dom(), 1, os);
        os << " -> ";
        go(t->cod(), 0, os);
        if (prec > 0) os << ")";
        return;
      case Type::Kind::Con:
        if (t->name == kPair && t->args.size() == 2) {
          os << "(";
          go(t->args[0], 0, os);
          os << ", ";
          go(t->args[1], 0, os);
          os << ")";
          return;
        }
        if (t->args.empty()) {
          os << t->name;
          return;
        }
        if (prec > 1) os << "(";
        os << t->name;
        for (auto& a : t->args) {
          os << " ";
          go(a, 2, os);
        }
        if (prec > 1) os << ")";
        return;
    }
  }
};

}  // namespace

std::string pretty(const TypePtr& t) {
  Printer p(t);
  std::ostringstream os;
  p.go(t, 0, os);
  return os.str();
}

// ---------------------------------------------------------------- static context

StaticContext StaticContext::builtin() {
  StaticContext s;
  s.add_data({"Int", {}, {}});
  s.add_data({kUnit, {}, {{kUnit, {}}}});
  s.add_data({"Bool", {}, {{"False", {}}, {"True", {}}}});
  s.add_data({kPair, {"a", "b"}, {{kPair, {tvar("a"), tvar("b")}}}});
  return s;
}

void StaticContext::add_data(const DataDecl& d) {
  if (tycons.count(d.name)) throw std::runtime_error("duplicate type constructor " + d.name);
  tycons[d.name] = static_cast<int>(d.params.size());
  auto& list = cons_of[d.name];
  for (auto& c : d.cons) {
    if (cons.count(c.name)) throw std::runtime_error("duplicate data constructor " + c.name);
    for (auto& f : c.fields)
      for (auto& v : free_type_vars(f))
        if (std::find(d.params.begin(), d.params.end(), v) == d.params.end())
          throw std::runtime_error("type variable " + v + " not bound in data " + d.name);
    std::vector<TypePtr> res_args;
    for (auto& p : d.params) res_args.push_back(tvar(p));
    TypePtr t = tcon(d.name, res_args);
    for (auto it = c.fields.rbegin(); it != c.fields.rend(); ++it) t = tarrow(*it, t);
    std::vector<std::pair<std::string, Specificity>> bs;
    for (auto& p : d.params) bs.emplace_back(p, Specificity::Specified);
    cons[c.name] = ConInfo{d.params, c.fields, d.name, tforalls(bs, t)};
    list.push_back(c.name);
  }
}

const ConInfo* StaticContext::con(const std::string& k) const {
  auto it = cons.find(k);
  return it == cons.end() ? nullptr : &it->second;
}

TypingContext::TypingContext(std::shared_ptr<const StaticContext> base) : base_(std::move(base)) {}

TypingContext TypingContext::with_term(const std::string& x, TypePtr t) const {
  TypingContext c = *this;
  CtxEntry e{CtxEntry::Kind::Term, x, std::move(t)};
  c.head_ = std::make_shared<const Node>(Node{std::move(e), head_});
  return c;
}

TypingContext TypingContext::with_tyvar(const std::string& internal,
                                        std::optional<std::string> source, int level) const {
  TypingContext c = *this;
  CtxEntry e{CtxEntry::Kind::TyVar, internal, nullptr, std::move(source), level};
  c.head_ = std::make_shared<const Node>(Node{std::move(e), head_});
  return c;
}

const CtxEntry* TypingContext::lookup_term(const std::string& x) const {
  for (auto n = head_.get(); n; n = n->next.get())
    if (n->entry.kind == CtxEntry::Kind::Term && n->entry.name == x) return &n->entry;
  return nullptr;
}

const CtxEntry* TypingContext::lookup_source_tyvar(const std::string& source) const {
  for (auto n = head_.get(); n; n = n->next.get())
    if (n->entry.kind == CtxEntry::Kind::TyVar && n->entry.source == source) return &n->entry;
  return nullptr;
}

bool TypingContext::has_tyvar(const std::string& internal) const {
  for (auto n = head_.get(); n; n = n->next.get())
    if (n->entry.kind == CtxEntry::Kind::TyVar && n->entry.name == internal) return true;
  return false;
}

std::vector<CtxEntry> TypingContext::entries() const {
  std::vector<CtxEntry> out;
  for (auto n = head_.get(); n; n = n->next.get()) out.push_back(n->entry);
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace mplc
