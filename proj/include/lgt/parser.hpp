#pragma once

// Concrete syntax for .lgt files: type blocks followed by at most one
// expression. Lexical classes: links are uppercase-leading, atom/type names
// lowercase-leading (or integer literals), graph contexts $name[links],
// fusion X >< Y, nu binders, '\' abstractions, case/of/otherwise, let/in.

#include <cctype>

#include "lgt/grammar.hpp"

namespace lgt {

struct ParseError : LgtError {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : LgtError(msg + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

struct Program {
  std::vector<ProductionRule> typeDefs;
  ExprPtr main;  // null for grammar-only files
};

namespace detail {

enum class Tok {
  End, LIdent, UIdent, Int, LParen, RParen, LBrack, RBrack, Comma, Dot, Semi,
  Colon, Bar, Arrow, Fuse, Dollar, Backslash, Eq,
  KwNu, KwCase, KwOf, KwOtherwise, KwLet, KwIn, KwType
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : s(src) { next(); }
  const Token& peek() const { return tok; }
  Token take() {
    Token t = tok;
    next();
    return t;
  }

 private:
  void next() {
    for (;;) {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) advance();
      if (pos + 1 < s.size() && s[pos] == '/' && s[pos + 1] == '/') {
        while (pos < s.size() && s[pos] != '\n') advance();
        continue;
      }
      break;
    }
    tok.line = line;
    tok.col = col;
    if (pos >= s.size()) {
      tok.kind = Tok::End;
      tok.text.clear();
      return;
    }
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string t;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        t += s[pos];
        advance();
      }
      tok.kind = Tok::Int;
      tok.text = t;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string t;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                s[pos] == '_' || s[pos] == '\'')) {
        t += s[pos];
        advance();
      }
      if (t == "nu") tok.kind = Tok::KwNu;
      else if (t == "case") tok.kind = Tok::KwCase;
      else if (t == "of") tok.kind = Tok::KwOf;
      else if (t == "otherwise") tok.kind = Tok::KwOtherwise;
      else if (t == "let") tok.kind = Tok::KwLet;
      else if (t == "in") tok.kind = Tok::KwIn;
      else if (t == "type") tok.kind = Tok::KwType;
      else if (std::isupper(static_cast<unsigned char>(t[0]))) tok.kind = Tok::UIdent;
      else tok.kind = Tok::LIdent;
      tok.text = t;
      return;
    }
    auto two = [&](char a, char b) {
      return c == a && pos + 1 < s.size() && s[pos + 1] == b;
    };
    if (two('-', '>')) { advance(); advance(); tok.kind = Tok::Arrow; return; }
    if (two('>', '<')) { advance(); advance(); tok.kind = Tok::Fuse; return; }
    advance();
    switch (c) {
      case '(': tok.kind = Tok::LParen; return;
      case ')': tok.kind = Tok::RParen; return;
      case '[': tok.kind = Tok::LBrack; return;
      case ']': tok.kind = Tok::RBrack; return;
      case ',': tok.kind = Tok::Comma; return;
      case '.': tok.kind = Tok::Dot; return;
      case ';': tok.kind = Tok::Semi; return;
      case ':': tok.kind = Tok::Colon; return;
      case '|': tok.kind = Tok::Bar; return;
      case '\\': tok.kind = Tok::Backslash; return;
      case '$': tok.kind = Tok::Dollar; return;
      case '=': tok.kind = Tok::Eq; return;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", tok.line, tok.col);
    }
  }
  void advance() {
    if (s[pos] == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    pos++;
  }

  const std::string& s;
  size_t pos = 0;
  int line = 1, col = 1;
  Token tok;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lx(src) {}

  Program program() {
    Program p;
    while (at(Tok::KwType)) p.typeDefs.push_back(type_def());
    if (!at(Tok::End)) p.main = expr();
    expect(Tok::End, "end of input");
    return p;
  }

  ExprPtr expr() {
    ExprPtr acc = primary();
    while (starts_primary()) acc = expr_app(acc, primary());
    return acc;
  }

  TermPtr template_unit() { return tmpl_unit(false); }

  // "<template> : <type atom>" verification goal
  std::pair<TermPtr, TypeAtomPtr> goal() {
    TermPtr t = tmpl_unit(false);
    expect(Tok::Colon, "':'");
    TypeAtomPtr ty = type_atom();
    expect(Tok::End, "end of goal");
    return {t, ty};
  }

  TypeAtomPtr type_atom() { return type_atom_impl(); }

  void finish() { expect(Tok::End, "end of input"); }

 private:
  Lexer lx;

  bool at(Tok k) const { return lx.peek().kind == k; }
  Token expect(Tok k, const char* what) {
    if (!at(k)) err(std::string("expected ") + what);
    return lx.take();
  }
  [[noreturn]] void err(const std::string& msg) const {
    throw ParseError(msg, lx.peek().line, lx.peek().col);
  }

  bool starts_primary() const {
    switch (lx.peek().kind) {
      case Tok::LIdent:
      case Tok::UIdent:
      case Tok::Int:
      case Tok::Dollar:
      case Tok::LParen:
      case Tok::KwNu:
      case Tok::KwCase:
      case Tok::KwLet:
        return true;
      default:
        return false;
    }
  }

  ExprPtr primary() {
    if (at(Tok::KwCase)) return case_expr();
    if (at(Tok::KwLet)) return let_expr();
    if (at(Tok::LParen)) return paren();
    return expr_graph(tmpl_unit(false));
  }

  ExprPtr case_expr() {
    lx.take();
    ExprPtr s = expr();
    expect(Tok::KwOf, "'of'");
    Token patTok = lx.peek();
    TermPtr pat = tmpl_unit(true);
    if (has_abstraction(pat))
      throw ParseError("abstraction atom not allowed in a case pattern", patTok.line, patTok.col);
    check_pattern_contexts(pat, patTok);
    expect(Tok::Arrow, "'->'");
    ExprPtr th = expr();
    expect(Tok::Bar, "'|'");
    expect(Tok::KwOtherwise, "'otherwise'");
    expect(Tok::Arrow, "'->'");
    ExprPtr el = expr();
    return expr_case(s, pat, th, el);
  }

  ExprPtr let_expr() {
    lx.take();
    expect(Tok::Dollar, "'$'");
    std::string name = expect(Tok::LIdent, "context name").text;
    std::vector<LinkName> links;
    if (at(Tok::LBrack)) links = link_list(Tok::LBrack, Tok::RBrack);
    TypeAtomPtr anno;
    if (at(Tok::Colon)) {
      lx.take();
      anno = type_atom_impl();
    }
    expect(Tok::Eq, "'='");
    ExprPtr rhs = expr();
    expect(Tok::KwIn, "'in'");
    ExprPtr body = expr();
    auto abs = std::make_shared<AbsName>(AbsName{name, links, anno, body});
    return expr_app(expr_graph(term_abs(abs, {})), rhs);
  }

  // '(' ... ')' in expression position: abstraction, molecule, null graph,
  // or a parenthesized expression.
  ExprPtr paren() {
    lx.take();
    if (at(Tok::Backslash)) {
      TermPtr lam = lambda_atom();
      return expr_graph(lam);
    }
    if (at(Tok::RParen)) {
      lx.take();
      return expr_graph(term_null());
    }
    ExprPtr first = expr();
    if (at(Tok::Comma)) {
      if (first->kind != ExprKind::Graph) err("molecule component must be a template");
      TermPtr acc = first->graph;
      while (at(Tok::Comma)) {
        lx.take();
        acc = term_mol(acc, tmpl_unit(false));
      }
      expect(Tok::RParen, "')'");
      return expr_graph(acc);
    }
    expect(Tok::RParen, "')'");
    return first;
  }

  // after '(' '\': params '.' body ')' '(' links? ')'
  TermPtr lambda_atom() {
    expect(Tok::Backslash, "'\\'");
    struct Param {
      std::string name;
      std::vector<LinkName> links;
      TypeAtomPtr anno;
    };
    std::vector<Param> params;
    for (;;) {
      expect(Tok::Dollar, "'$'");
      std::string name = expect(Tok::LIdent, "context name").text;
      std::vector<LinkName> links;
      if (at(Tok::LBrack)) links = distinct_link_list();
      TypeAtomPtr anno;
      if (at(Tok::Colon)) {
        lx.take();
        anno = type_atom_impl();
      }
      params.push_back({name, links, anno});
      if (at(Tok::Dot)) break;
      if (!at(Tok::Dollar)) err("expected '$' (next parameter) or '.'");
    }
    expect(Tok::Dot, "'.'");
    ExprPtr body = expr();
    expect(Tok::RParen, "')'");
    std::vector<Arg> atomLinks;
    if (at(Tok::LParen)) {
      lx.take();
      if (!at(Tok::RParen)) {
        for (;;) {
          atomLinks.push_back(arg_link(expect(Tok::UIdent, "link name").text));
          if (!at(Tok::Comma)) break;
          lx.take();
        }
      }
      expect(Tok::RParen, "')'");
    }
    // multi-parameter sugar: inner abstraction atoms carry the same links
    ExprPtr acc = body;
    for (size_t i = params.size(); i-- > 1;) {
      auto abs = std::make_shared<AbsName>(
          AbsName{params[i].name, params[i].links, params[i].anno, acc});
      acc = expr_graph(term_abs(abs, atomLinks));
    }
    auto abs = std::make_shared<AbsName>(AbsName{params[0].name, params[0].links,
                                                 params[0].anno, acc});
    return term_abs(abs, atomLinks);
  }

  // Template unit: nu-term, parenthesized molecule, atom, context or fusion.
  TermPtr tmpl_unit(bool inPattern) {
    if (at(Tok::KwNu)) {
      lx.take();
      std::vector<LinkName> bs;
      while (at(Tok::UIdent)) bs.push_back(lx.take().text);
      if (bs.empty()) err("expected link name after 'nu'");
      expect(Tok::Dot, "'.'");
      TermPtr body = tmpl_unit(inPattern);
      for (auto it = bs.rbegin(); it != bs.rend(); ++it) body = term_nu(*it, body);
      return body;
    }
    if (at(Tok::LParen)) {
      lx.take();
      if (at(Tok::Backslash)) {
        if (inPattern) err("abstraction atom not allowed in a case pattern");
        return lambda_atom();
      }
      if (at(Tok::RParen)) {
        lx.take();
        return term_null();
      }
      TermPtr acc = tmpl_unit(inPattern);
      while (at(Tok::Comma)) {
        lx.take();
        acc = term_mol(acc, tmpl_unit(inPattern));
      }
      expect(Tok::RParen, "')'");
      return acc;
    }
    if (at(Tok::UIdent)) {
      Token a = lx.take();
      expect(Tok::Fuse, "'><'");
      Token b = expect(Tok::UIdent, "link name");
      return term_fusion(a.text, b.text);
    }
    if (at(Tok::Dollar)) return context_unit(inPattern);
    if (at(Tok::LIdent) || at(Tok::Int)) {
      std::string name = lx.take().text;
      std::vector<Arg> args;
      if (at(Tok::LParen)) args = arg_list(inPattern);
      return term_atom(name, std::move(args));
    }
    err("expected a template");
  }

  TermPtr context_unit(bool inPattern) {
    lx.take();  // '$'
    Token nameTok = expect(Tok::LIdent, "context name");
    std::vector<Arg> args;
    if (at(Tok::LBrack)) {
      lx.take();
      if (!at(Tok::RBrack)) {
        for (;;) {
          args.push_back(argument(inPattern));
          if (!at(Tok::Comma)) break;
          lx.take();
        }
      }
      expect(Tok::RBrack, "']'");
    }
    TypeAtomPtr anno;
    if (at(Tok::Colon)) {
      lx.take();
      anno = type_atom_impl();
    }
    // plain-link duplicates are rejected ("a sequence of different links")
    std::set<LinkName> seen;
    for (auto& a : args)
      if (a.is_link() && !seen.insert(a.link).second)
        throw ParseError("duplicate link " + a.link + " in context $" + nameTok.text,
                         nameTok.line, nameTok.col);
    return term_context(nameTok.text, std::move(args), anno);
  }

  std::vector<Arg> arg_list(bool inPattern) {
    expect(Tok::LParen, "'('");
    std::vector<Arg> args;
    if (!at(Tok::RParen)) {
      for (;;) {
        args.push_back(argument(inPattern));
        if (!at(Tok::Comma)) break;
        lx.take();
      }
    }
    expect(Tok::RParen, "')'");
    return args;
  }

  // Atom/context argument: link, nested atom, nested context, or a nested
  // arrow atom "(t1 -> t2)" (grammar RHS positions).
  Arg argument(bool inPattern) {
    if (at(Tok::UIdent)) return arg_link(lx.take().text);
    if (at(Tok::LIdent) || at(Tok::Int)) {
      std::string name = lx.take().text;
      std::vector<Arg> args;
      if (at(Tok::LParen)) args = arg_list(inPattern);
      return arg_nested(term_atom(name, std::move(args)));
    }
    if (at(Tok::Dollar)) return arg_nested(context_unit(inPattern));
    if (at(Tok::LParen)) {
      // nested arrow atom
      TypeAtomPtr arrow = arrow_in_parens();
      std::vector<Arg> links;
      if (at(Tok::LParen)) {
        lx.take();
        if (!at(Tok::RParen)) {
          for (;;) {
            links.push_back(arg_link(expect(Tok::UIdent, "link name").text));
            if (!at(Tok::Comma)) break;
            lx.take();
          }
        }
        expect(Tok::RParen, "')'");
      }
      return arg_nested(term_arrow_atom(arrow, std::move(links)));
    }
    err("expected an argument");
  }

  // type atom: name(links) | (arrow)(links)
  TypeAtomPtr type_atom_impl() {
    if (at(Tok::LIdent)) {
      std::string name = lx.take().text;
      std::vector<LinkName> links;
      if (at(Tok::LParen)) links = link_list(Tok::LParen, Tok::RParen);
      return type_var(name, links);
    }
    if (at(Tok::LParen)) {
      TypeAtomPtr arrow = arrow_in_parens();
      std::vector<LinkName> links;
      if (at(Tok::LParen)) links = link_list(Tok::LParen, Tok::RParen);
      return arrow_fill_links(arrow, links);
    }
    err("expected a type atom");
  }

  // '(' t1 -> t2 -> ... ')' (right associative; inner uses carry own links)
  TypeAtomPtr arrow_in_parens() {
    expect(Tok::LParen, "'('");
    std::vector<TypeAtomPtr> parts;
    parts.push_back(type_use());
    while (at(Tok::Arrow)) {
      lx.take();
      parts.push_back(type_use());
    }
    expect(Tok::RParen, "')'");
    if (parts.size() < 2) err("expected '->' in arrow type");
    TypeAtomPtr acc = parts.back();
    for (size_t i = parts.size() - 1; i-- > 0;) acc = type_arrow(parts[i], acc, {});
    return acc;
  }

  // abbreviation: (t1 -> t2 -> t3)(Z) fills the shared link vector down the
  // codomain spine where none was written explicitly
  static TypeAtomPtr arrow_fill_links(const TypeAtomPtr& t, const std::vector<LinkName>& links) {
    if (!t->is_arrow()) return t;
    auto c = std::make_shared<TypeAtom>(*t);
    c->links = links;
    if (c->cod->is_arrow() && c->cod->links.empty()) c->cod = arrow_fill_links(c->cod, links);
    return c;
  }

  TypeAtomPtr type_use() {
    if (at(Tok::LIdent)) {
      std::string name = lx.take().text;
      std::vector<LinkName> links;
      if (at(Tok::LParen)) links = link_list(Tok::LParen, Tok::RParen);
      return type_var(name, links);
    }
    if (at(Tok::LParen)) {
      TypeAtomPtr arrow = arrow_in_parens();
      std::vector<LinkName> links;
      if (at(Tok::LParen)) links = link_list(Tok::LParen, Tok::RParen);
      return arrow_fill_links(arrow, links);
    }
    err("expected a type");
  }

  std::vector<LinkName> link_list(Tok open, Tok close) {
    expect(open, open == Tok::LBrack ? "'['" : "'('");
    std::vector<LinkName> out;
    if (!at(close)) {
      for (;;) {
        out.push_back(expect(Tok::UIdent, "link name").text);
        if (!at(Tok::Comma)) break;
        lx.take();
      }
    }
    expect(close, close == Tok::RBrack ? "']'" : "')'");
    return out;
  }

  std::vector<LinkName> distinct_link_list() {
    Token t = lx.peek();
    auto ls = link_list(Tok::LBrack, Tok::RBrack);
    std::set<LinkName> s(ls.begin(), ls.end());
    if (s.size() != ls.size())
      throw ParseError("duplicate links in parameter vector", t.line, t.col);
    return ls;
  }

  void check_pattern_contexts(const TermPtr&, const Token&) {
    // annotations are optional here; typed mode enforces them later
  }

  ProductionRule type_def() {
    Token kw = expect(Tok::KwType, "'type'");
    std::string head = expect(Tok::LIdent, "type name").text;
    std::vector<LinkName> links = link_list(Tok::LParen, Tok::RParen);
    {
      std::set<LinkName> s(links.begin(), links.end());
      if (s.size() != links.size())
        throw ParseError("duplicate links in production head", kw.line, kw.col);
    }
    expect(Tok::Arrow, "'->'");
    TermPtr acc = tmpl_unit(false);
    while (at(Tok::Comma)) {
      lx.take();
      acc = term_mol(acc, tmpl_unit(false));
    }
    expect(Tok::Semi, "';'");
    ProductionRule r;
    r.head = head;
    r.headLinks = links;
    r.rhs = acc;
    r.line = kw.line;
    r.col = kw.col;
    return r;
  }
};

}  // namespace detail

inline Program parse_program(const std::string& text) {
  detail::Parser p(text);
  return p.program();
}

inline std::vector<ProductionRule> parse_type_defs(const std::string& text) {
  Program p = parse_program(text);
  if (p.main) throw LgtError("expected type definitions only");
  return p.typeDefs;
}

inline ExprPtr parse_expr(const std::string& text) {
  detail::Parser p(text);
  ExprPtr e = p.expr();
  p.finish();
  return e;
}

inline TermPtr parse_template(const std::string& text) {
  detail::Parser p(text);
  TermPtr t = p.template_unit();
  p.finish();
  return t;
}

inline std::pair<TermPtr, TypeAtomPtr> parse_goal(const std::string& text) {
  detail::Parser p(text);
  return p.goal();
}

inline TypeAtomPtr parse_type_atom(const std::string& text) {
  detail::Parser p(text);
  return p.type_atom();
}

}  // namespace lgt
