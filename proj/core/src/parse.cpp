#include "anyk/parse.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace anyk {
namespace {

enum class Tok { Ident, Number, String, LParen, RParen, Comma, Semi, Rule, Plus, Colon, Star, DotDot, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      const std::size_t line = line_, col = col_;
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", line, col});
        return out;
      }
      const char c = src_[pos_];
      auto single = [&](Tok k) {
        advance();
        out.push_back({k, std::string(1, c), line, col});
      };
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          id += src_[pos_];
          advance();
        }
        out.push_back({Tok::Ident, id, line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        out.push_back({Tok::Number, number(), line, col});
      } else if (c == '\'' || c == '"') {
        out.push_back({Tok::String, quoted(c, line, col), line, col});
      } else if (c == ':' && peek(1) == '-') {
        advance();
        advance();
        out.push_back({Tok::Rule, ":-", line, col});
      } else if (c == '.' && peek(1) == '.') {
        advance();
        advance();
        out.push_back({Tok::DotDot, "..", line, col});
      } else if (c == '(') {
        single(Tok::LParen);
      } else if (c == ')') {
        single(Tok::RParen);
      } else if (c == ',') {
        single(Tok::Comma);
      } else if (c == ';') {
        single(Tok::Semi);
      } else if (c == '+') {
        single(Tok::Plus);
      } else if (c == ':') {
        single(Tok::Colon);
      } else if (c == '*') {
        single(Tok::Star);
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
      }
    }
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' || (c == '-' && peek(1) == '-')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string number() {
    std::string s;
    if (src_[pos_] == '-') {
      s += '-';
      advance();
    }
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        s += src_[pos_];
        advance();
      }
    };
    digits();
    // a '.' followed by '.' is a range, not a decimal point
    if (pos_ < src_.size() && src_[pos_] == '.' && peek(1) != '.') {
      s += '.';
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      s += src_[pos_];
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
        s += src_[pos_];
        advance();
      }
      digits();
    }
    return s;
  }

  std::string quoted(char quote, std::size_t line, std::size_t col) {
    advance();
    std::string s;
    while (pos_ < src_.size() && src_[pos_] != quote) {
      s += src_[pos_];
      advance();
    }
    if (pos_ >= src_.size()) throw ParseError("unterminated string", line, col);
    advance();
    return s;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

bool keyword(const Token& t, std::string_view kw) {
  if (t.kind != Tok::Ident || t.text.size() != kw.size()) return false;
  return std::equal(t.text.begin(), t.text.end(), kw.begin(), [](char a, char b) {
    return std::toupper(static_cast<unsigned char>(a)) == b;
  });
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ParsedQuery run() {
    ParsedQuery out;
    if (keyword(cur(), "QUERY")) ++i_;
    out.query.name = expect(Tok::Ident, "query name").text;
    expect(Tok::LParen, "'('");
    auto head = head_list();
    expect(Tok::RParen, "')'");
    expect(Tok::Rule, "':-'");
    do {
      out.query.body.push_back(atom());
    } while (accept(Tok::Comma));
    accept(Tok::Semi);

    const auto body_vars = out.query.variables();
    if (head.all) {
      out.query.head = body_vars;
    } else {
      for (std::size_t k = 0; k < head.vars.size(); ++k) {
        if (std::find(body_vars.begin(), body_vars.end(), head.vars[k]) == body_vars.end()) {
          throw ParseError("head variable " + head.vars[k] + " does not occur in the body",
                           head.where[k].line, head.where[k].column);
        }
      }
      out.query.head = head.vars;
    }

    if (keyword(cur(), "ORDER")) {
      ++i_;
      if (!keyword(cur(), "BY")) fail("expected BY");
      ++i_;
      out.ranking = order(body_vars);
      accept(Tok::Semi);
    } else {
      out.ranking = LexOrder{out.query.head, Direction::Asc};
    }
    if (cur().kind != Tok::End) fail("unexpected '" + cur().text + "'");
    return out;
  }

 private:
  struct Head {
    bool all = false;
    std::vector<std::string> vars;
    std::vector<Token> where;
  };

  const Token& cur() const { return toks_[i_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur().line, cur().column);
  }

  bool accept(Tok k) {
    if (cur().kind != k) return false;
    ++i_;
    return true;
  }

  const Token& expect(Tok k, const std::string& what) {
    if (cur().kind != k) {
      fail("expected " + what + (cur().kind == Tok::End ? " at end of input" : ", got '" + cur().text + "'"));
    }
    return toks_[i_++];
  }

  static std::pair<std::string, std::optional<long>> split_index(const std::string& s) {
    std::size_t k = s.size();
    while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
    if (k == s.size() || s.size() - k > 9) return {s, std::nullopt};
    return {s.substr(0, k), std::stol(s.substr(k))};
  }

  Head head_list() {
    Head h;
    if (cur().kind == Tok::Star || cur().kind == Tok::DotDot) {
      ++i_;
      h.all = true;
      return h;
    }
    if (cur().kind == Tok::RParen) return h;
    do {
      const Token first = expect(Tok::Ident, "head variable");
      if (accept(Tok::DotDot)) {
        const Token last = expect(Tok::Ident, "range end");
        auto [p1, a] = split_index(first.text);
        auto [p2, b] = split_index(last.text);
        if (!a || !b || p1 != p2 || *a > *b) {
          throw ParseError("bad variable range " + first.text + ".." + last.text, first.line,
                           first.column);
        }
        for (long k = *a; k <= *b; ++k) {
          h.vars.push_back(p1 + std::to_string(k));
          h.where.push_back(first);
        }
      } else {
        h.vars.push_back(first.text);
        h.where.push_back(first);
      }
    } while (accept(Tok::Comma));
    return h;
  }

  Atom atom() {
    Atom a;
    a.relation = expect(Tok::Ident, "relation name").text;
    expect(Tok::LParen, "'('");
    do {
      const Token& t = cur();
      switch (t.kind) {
        case Tok::Ident:
          a.terms.push_back(Term::variable(t.text));
          break;
        case Tok::Number:
          a.terms.push_back(Term::constant(Value::parse(t.text, Value::infer_tag(t.text))));
          break;
        case Tok::String:
          a.terms.push_back(Term::constant(Value(t.text)));
          break;
        default:
          fail("expected a variable or constant");
      }
      ++i_;
    } while (accept(Tok::Comma));
    expect(Tok::RParen, "')'");
    return a;
  }

  std::string order_variable(const std::vector<std::string>& body_vars) {
    const Token& t = expect(Tok::Ident, "variable");
    if (std::find(body_vars.begin(), body_vars.end(), t.text) == body_vars.end()) {
      throw ParseError("unknown variable in ORDER BY: " + t.text, t.line, t.column);
    }
    return t.text;
  }

  WeightTerm weight_term(const std::vector<std::string>& body_vars) {
    if (cur().kind == Tok::Ident && toks_[i_ + 1].kind == Tok::Colon) {
      if (cur().text != "w") fail("expected 'w:' before a weight table");
      i_ += 2;
      WeightTerm t;
      t.table = expect(Tok::Ident, "weight table name").text;
      expect(Tok::LParen, "'('");
      t.variable = order_variable(body_vars);
      expect(Tok::RParen, "')'");
      return t;
    }
    return WeightTerm{order_variable(body_vars), std::nullopt};
  }

  Direction direction() {
    if (keyword(cur(), "ASC")) {
      ++i_;
      return Direction::Asc;
    }
    if (keyword(cur(), "DESC")) {
      ++i_;
      return Direction::Desc;
    }
    return Direction::Asc;
  }

  RankingSpec order(const std::vector<std::string>& body_vars) {
    if (keyword(cur(), "LEX")) {
      ++i_;
      LexOrder lex;
      std::set<std::string> seen;
      do {
        const Token at = cur();
        lex.variables.push_back(order_variable(body_vars));
        if (!seen.insert(lex.variables.back()).second) {
          throw ParseError("repeated variable in LEX order: " + at.text, at.line, at.column);
        }
      } while (accept(Tok::Comma));
      lex.direction = direction();
      return lex;
    }
    if (keyword(cur(), "SUM")) {
      ++i_;
      SumOrder sum;
      do {
        sum.terms.push_back(weight_term(body_vars));
      } while (accept(Tok::Plus));
      sum.direction = direction();
      return sum;
    }
    if (keyword(cur(), "MAX")) {
      ++i_;
      MaxOrder max;
      do {
        max.terms.push_back(weight_term(body_vars));
      } while (accept(Tok::Plus) || accept(Tok::Comma));
      max.direction = direction();
      return max;
    }
    if (keyword(cur(), "TUPLEWEIGHT")) {
      ++i_;
      return TupleWeightOrder{direction()};
    }
    fail("expected LEX, SUM, MAX or TUPLEWEIGHT");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace

ParsedQuery parse_query(std::string_view text, const Database* schema) {
  ParsedQuery pq = Parser(Lexer(text).run()).run();
  if (schema) validate(pq, *schema);
  return pq;
}

}  // namespace anyk
