#include "mplc/parser.hpp"

#include <cctype>
#include <sstream>

namespace mplc {

namespace {

std::string describe(int line, int col, const std::set<std::string>& expected, const std::string& found) {
  std::ostringstream os;
  os << line << ":" << col << ": expected ";
  bool first = true;
  for (auto& e : expected) {
    os << (first ? "" : ", ") << e;
    first = false;
  }
  os << " but found " << found;
  return os.str();
}

}  // namespace

ParseError::ParseError(int line, int col, std::set<std::string> expected, std::string found)
    : std::runtime_error(describe(line, col, expected, found)),
      line(line),
      col(col),
      expected(std::move(expected)),
      found(std::move(found)) {}

namespace {

enum class Tok { Var, Con, Int, Sym, Kw, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

const std::set<std::string> kKeywords = {"let", "in", "forall", "data", "undefined", "seq"};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      adv(1);
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\''))
        ++j;
      std::string w = s.substr(i, j - i);
      Tok k = kKeywords.count(w) ? Tok::Kw : std::isupper(static_cast<unsigned char>(c)) ? Tok::Con : Tok::Var;
      out.push_back({k, w, l, cl});
      adv(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Int, s.substr(i, j - i), l, cl});
      adv(j - i);
      continue;
    }
    static const char* multi[] = {"->", "::", "/\\"};
    bool matched = false;
    for (auto m : multi) {
      std::string ms = m;
      if (s.compare(i, ms.size(), ms) == 0) {
        out.push_back({Tok::Sym, ms, l, cl});
        adv(ms.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string("\\=:@(),{};.|!").find(c) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, c), l, cl});
      adv(1);
      continue;
    }
    throw ParseError(l, cl, {"token"}, std::string("'") + c + "'");
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

struct RawItem {
  bool is_sig = false;
  bool strict = false;
  std::string name;
  TypePtr sig;
  Equation eq;
  SrcPos pos;
};

class Parser {
 public:
  Parser(const std::vector<Token>& toks, size_t begin, size_t end)
      : toks_(toks), p_(begin), end_(end), eof_tok_{Tok::End, "", toks[end].line, toks[end].col} {
    if (toks[end].kind != Tok::End) eof_tok_.text = toks[end].text;
  }

  const Token& peek(size_t k = 0) const {
    size_t i = p_ + k;
    return i < end_ ? toks_[i] : eof_tok_;
  }
  bool at_end() const { return p_ >= end_; }
  bool is_sym(const std::string& s, size_t k = 0) const {
    auto& t = peek(k);
    return t.kind == Tok::Sym && t.text == s;
  }
  bool is_kw(const std::string& s, size_t k = 0) const {
    auto& t = peek(k);
    return t.kind == Tok::Kw && t.text == s;
  }

  [[noreturn]] void fail(std::set<std::string> expected) const {
    auto& t = peek();
    std::string found = t.text.empty() ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.col, std::move(expected), found);
  }

  void expect_sym(const std::string& s) {
    if (!is_sym(s)) fail({"'" + s + "'"});
    ++p_;
  }
  std::string expect_var() {
    if (peek().kind != Tok::Var) fail({"identifier"});
    return toks_[p_++].text;
  }
  void finish() {
    if (!at_end()) fail({"end of input"});
  }

  // ------------------------------------------------------------ types

  TypePtr type() {
    if (is_kw("forall")) {
      ++p_;
      std::vector<std::pair<std::string, Specificity>> bs;
      while (true) {
        if (peek().kind == Tok::Var) {
          bs.emplace_back(toks_[p_++].text, Specificity::Specified);
        } else if (is_sym("{")) {
          ++p_;
          bs.emplace_back(expect_var(), Specificity::Inferred);
          expect_sym("}");
        } else {
          break;
        }
      }
      if (bs.empty()) fail({"type variable", "'{'"});
      expect_sym(".");
      return tforalls(bs, type());
    }
    auto t = btype();
    if (is_sym("->")) {
      ++p_;
      return tarrow(t, type());
    }
    return t;
  }

  bool starts_atype() const {
    auto& t = peek();
    return t.kind == Tok::Var || t.kind == Tok::Con || (t.kind == Tok::Sym && t.text == "(");
  }

  TypePtr btype() {
    if (peek().kind == Tok::Con) {
      std::string n = toks_[p_++].text;
      std::vector<TypePtr> args;
      while (starts_atype()) args.push_back(atype());
      return tcon(n, args);
    }
    return atype();
  }

  TypePtr atype() {
    auto& t = peek();
    if (t.kind == Tok::Var) {
      ++p_;
      return tvar(t.text);
    }
    if (t.kind == Tok::Con) {
      ++p_;
      return tcon(t.text);
    }
    if (is_sym("(")) {
      ++p_;
      if (is_sym(")")) {
        ++p_;
        return tunit();
      }
      auto a = type();
      if (is_sym(",")) {
        ++p_;
        auto b = type();
        expect_sym(")");
        return tpair(a, b);
      }
      expect_sym(")");
      return a;
    }
    fail({"type"});
  }

  // ------------------------------------------------------------ expressions

  ExprPtr expr() {
    if (is_sym("\\")) {
      ++p_;
      std::vector<std::string> xs;
      while (peek().kind == Tok::Var) xs.push_back(toks_[p_++].text);
      if (xs.empty()) fail({"identifier"});
      expect_sym("->");
      auto body = expr();
      for (auto it = xs.rbegin(); it != xs.rend(); ++it) body = mk_lam(*it, body);
      return body;
    }
    if (is_sym("/\\")) {
      ++p_;
      std::vector<std::string> as;
      while (peek().kind == Tok::Var) as.push_back(toks_[p_++].text);
      if (as.empty()) fail({"type variable"});
      expect_sym("->");
      auto body = expr();
      for (auto it = as.rbegin(); it != as.rend(); ++it) body = mk_tylam(*it, body);
      return body;
    }
    if (is_kw("let")) {
      ++p_;
      std::vector<RawItem> items;
      if (is_sym("{")) {
        ++p_;
        if (!is_sym("}")) {
          items.push_back(item());
          while (is_sym(";")) {
            ++p_;
            if (is_sym("}")) break;
            items.push_back(item());
          }
        }
        expect_sym("}");
      } else {
        items.push_back(item());
        while (is_sym(";")) {
          ++p_;
          items.push_back(item());
        }
      }
      if (!is_kw("in")) fail({"'in'", "';'"});
      ++p_;
      auto body = expr();
      auto decls = group(items);
      if (decls.empty()) fail({"declaration"});
      for (auto it = decls.rbegin(); it != decls.rend(); ++it) body = mk_let(*it, body);
      return body;
    }
    return app();
  }

  bool starts_aexpr() const {
    auto& t = peek();
    if (t.kind == Tok::Var || t.kind == Tok::Con || t.kind == Tok::Int) return true;
    if (t.kind == Tok::Kw) return t.text == "undefined" || t.text == "seq";
    return t.kind == Tok::Sym && t.text == "(";
  }

  ExprPtr app() {
    if (!starts_aexpr()) fail({"expression"});
    auto& t0 = peek();
    SrcPos pos{t0.line, t0.col};
    ExprPtr f = aexpr();
    std::vector<Arg> args;
    while (true) {
      if (is_sym("@")) {
        ++p_;
        args.push_back(type_arg(atype()));
      } else if (starts_aexpr()) {
        args.push_back(term_arg(aexpr()));
      } else {
        break;
      }
    }
    if (args.empty()) return f;
    auto r = apply_spine(f, std::move(args));
    if (r->pos.line == 0) {
      Expr c = *r;
      c.pos = pos;
      return std::make_shared<const Expr>(std::move(c));
    }
    return r;
  }

  ExprPtr aexpr() {
    auto& t = peek();
    SrcPos pos{t.line, t.col};
    switch (t.kind) {
      case Tok::Var:
        ++p_;
        return mk_app(hvar(t.text), {}, pos);
      case Tok::Con:
        ++p_;
        return mk_app(hcon(t.text), {}, pos);
      case Tok::Int:
        ++p_;
        return mk_app(hlit(std::stoll(t.text)), {}, pos);
      case Tok::Kw:
        if (t.text == "undefined") {
          ++p_;
          return mk_app(hundefined(), {}, pos);
        }
        if (t.text == "seq") {
          ++p_;
          return mk_app(hseq(), {}, pos);
        }
        break;
      default:
        break;
    }
    if (!is_sym("(")) fail({"expression"});
    ++p_;
    if (is_sym(")")) {
      ++p_;
      return mk_app(hcon(kUnit), {}, pos);
    }
    if (is_sym(",") && is_sym(")", 1)) {
      p_ += 2;
      return mk_app(hcon(kPair), {}, pos);
    }
    auto e = expr();
    if (is_sym(":")) {
      ++p_;
      auto ty = type();
      expect_sym(")");
      return mk_app(hann(e, ty), {}, pos);
    }
    if (is_sym(",")) {
      ++p_;
      auto b = expr();
      expect_sym(")");
      return mk_app(hcon(kPair), {term_arg(e), term_arg(b)}, pos);
    }
    if (!is_sym(")")) fail({"')'", "':'", "','"});
    ++p_;
    return e;
  }

  // ------------------------------------------------------------ patterns

  bool starts_apat() const {
    auto& t = peek();
    if (t.kind == Tok::Var || t.kind == Tok::Con) return true;
    return t.kind == Tok::Sym && (t.text == "(" || t.text == "@");
  }

  Pattern apat() {
    auto& t = peek();
    Pattern p;
    if (t.kind == Tok::Var) {
      ++p_;
      p.kind = Pattern::Kind::Var;
      p.name = t.text;
      return p;
    }
    if (t.kind == Tok::Con) {
      ++p_;
      p.kind = Pattern::Kind::Con;
      p.name = t.text;
      return p;
    }
    if (is_sym("@")) {
      ++p_;
      p.kind = Pattern::Kind::TyVar;
      p.name = expect_var();
      return p;
    }
    if (!is_sym("(")) fail({"pattern"});
    ++p_;
    if (is_sym(")")) {
      ++p_;
      p.kind = Pattern::Kind::Con;
      p.name = kUnit;
      return p;
    }
    if (peek().kind == Tok::Var && is_sym("::", 1)) {
      p.kind = Pattern::Kind::Var;
      p.name = toks_[p_].text;
      p_ += 2;
      p.ann = type();
      expect_sym(")");
      return p;
    }
    Pattern inner;
    if (peek().kind == Tok::Con || (is_sym("(") && is_sym(",", 1) && is_sym(")", 2))) {
      inner.kind = Pattern::Kind::Con;
      if (peek().kind == Tok::Con) {
        inner.name = toks_[p_++].text;
      } else {
        p_ += 3;
        inner.name = kPair;
      }
      while (is_sym("@")) {
        ++p_;
        inner.type_args.push_back(atype());
      }
      while (starts_apat()) inner.args.push_back(apat());
    } else {
      inner = apat();
    }
    if (is_sym(",")) {
      ++p_;
      Pattern b = pat_in_parens();
      expect_sym(")");
      Pattern pr;
      pr.kind = Pattern::Kind::Con;
      pr.name = kPair;
      pr.args = {inner, b};
      return pr;
    }
    expect_sym(")");
    return inner;
  }

  Pattern pat_in_parens() {
    if (peek().kind == Tok::Con) {
      Pattern p;
      p.kind = Pattern::Kind::Con;
      p.name = toks_[p_++].text;
      while (is_sym("@")) {
        ++p_;
        p.type_args.push_back(atype());
      }
      while (starts_apat()) p.args.push_back(apat());
      return p;
    }
    return apat();
  }

  // ------------------------------------------------------------ declarations

  RawItem item() {
    RawItem it;
    auto& t = peek();
    it.pos = {t.line, t.col};
    if (is_sym("!")) {
      ++p_;
      it.strict = true;
    }
    it.name = expect_var();
    if (!it.strict && is_sym(":")) {
      ++p_;
      it.is_sig = true;
      it.sig = type();
      return it;
    }
    while (starts_apat()) it.eq.pats.push_back(apat());
    if (!is_sym("=")) fail(it.eq.pats.empty() && !it.strict ? std::set<std::string>{"':'", "'='", "pattern"}
                                                           : std::set<std::string>{"'='", "pattern"});
    ++p_;
    it.eq.rhs = expr();
    return it;
  }

  static std::vector<Decl> group(const std::vector<RawItem>& items) {
    std::vector<Decl> out;
    bool open = false;  // last decl can still take equations
    for (auto& it : items) {
      if (it.is_sig) {
        Decl d;
        d.name = it.name;
        d.sig = it.sig;
        d.pos = it.pos;
        out.push_back(std::move(d));
        open = true;
        continue;
      }
      if (open && out.back().name == it.name) {
        auto& d = out.back();
        if (!d.eqs.empty() && d.eqs[0].pats.size() != it.eq.pats.size())
          throw ParseError(it.pos.line, it.pos.col,
                           {"equation with " + std::to_string(d.eqs[0].pats.size()) + " patterns"},
                           "'" + it.name + "'");
        if (!d.eqs.empty() && d.strict != it.strict)
          throw ParseError(it.pos.line, it.pos.col, {"equation with matching strictness"}, "'" + it.name + "'");
        d.strict = it.strict;
        d.eqs.push_back(it.eq);
        continue;
      }
      if (open && out.back().eqs.empty())
        throw ParseError(it.pos.line, it.pos.col, {"equation for '" + out.back().name + "'"},
                         "'" + it.name + "'");
      Decl d;
      d.name = it.name;
      d.strict = it.strict;
      d.pos = it.pos;
      d.eqs.push_back(it.eq);
      out.push_back(std::move(d));
      open = true;
    }
    if (!out.empty() && out.back().eqs.empty()) {
      auto& d = out.back();
      throw ParseError(d.pos.line, d.pos.col, {"equation for '" + d.name + "'"}, "end of declarations");
    }
    return out;
  }

  DataDecl data() {
    ++p_;  // 'data'
    DataDecl d;
    if (peek().kind != Tok::Con) fail({"type constructor"});
    d.name = toks_[p_++].text;
    while (peek().kind == Tok::Var) d.params.push_back(toks_[p_++].text);
    expect_sym("=");
    while (true) {
      if (peek().kind != Tok::Con) fail({"data constructor"});
      DataCon c;
      c.name = toks_[p_++].text;
      while (starts_atype()) c.fields.push_back(atype());
      d.cons.push_back(std::move(c));
      if (!is_sym("|")) break;
      ++p_;
    }
    return d;
  }

  const std::vector<Token>& toks_;
  size_t p_;
  size_t end_;
  Token eof_tok_;
};

}  // namespace

Program parse_program(const std::string& text) {
  auto toks = lex(text);
  // a token in column 1 starts a new top-level item
  std::vector<size_t> starts;
  for (size_t i = 0; i + 1 < toks.size(); ++i)
    if (toks[i].col == 1 || i == 0) starts.push_back(i);
  starts.push_back(toks.size() - 1);

  Program prog;
  std::vector<RawItem> items;
  for (size_t k = 0; k + 1 < starts.size(); ++k) {
    Parser ps(toks, starts[k], starts[k + 1]);
    while (!ps.at_end()) {
      if (ps.is_sym(";")) {
        ++ps.p_;
        continue;
      }
      if (ps.is_kw("data")) {
        prog.data.push_back(ps.data());
      } else {
        items.push_back(ps.item());
      }
      if (!ps.at_end() && !ps.is_sym(";")) ps.fail({"';'", "new line"});
    }
  }
  for (auto& d : Parser::group(items)) {
    if (d.name == "main" && !d.sig && d.eqs.size() == 1 && d.eqs[0].pats.empty() && !d.strict) {
      if (prog.main) throw ParseError(d.pos.line, d.pos.col, {"single main"}, "second 'main'");
      prog.main = d.eqs[0].rhs;
      continue;
    }
    if (prog.main) throw ParseError(d.pos.line, d.pos.col, {"end of input"}, "declaration after main");
    prog.decls.push_back(std::move(d));
  }
  return prog;
}

TypePtr parse_type(const std::string& text) {
  auto toks = lex(text);
  Parser ps(toks, 0, toks.size() - 1);
  auto t = ps.type();
  ps.finish();
  return t;
}

ExprPtr parse_expr(const std::string& text) {
  auto toks = lex(text);
  Parser ps(toks, 0, toks.size() - 1);
  auto e = ps.expr();
  ps.finish();
  return e;
}

}  // namespace mplc
