#include <cctype>
#include <set>

#include "cpn/textio.hpp"

namespace cpn {
namespace {

enum class Tok {
  Ident, Int,
  LBrace, RBrace, LBracket, RBracket, LParen, RParen,
  Comma, Colon, Caret, Assign, Plus, Star,
  Lt, Le, EqEq, Ge, Gt,
  End,
};

struct Token {
  Tok type = Tok::End;
  std::string text;
  long long value = 0;
  SourceSpan span;
};

// Unwinds to parse_net after a diagnostic has been recorded.
struct ParseAbort {};

class Lexer {
 public:
  Lexer(std::string_view text, std::vector<ParseDiagnostic>& diags) : text_(text), diags_(diags) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= text_.size()) break;
      out.push_back(next_token());
    }
    Token end;
    end.type = Tok::End;
    end.span = here(pos_, pos_);
    out.push_back(end);
    return out;
  }

 private:
  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  SourceSpan here(size_t begin, size_t end) const {
    return {begin, end, line_, column_};
  }

  Token next_token() {
    size_t begin = pos_;
    int line = line_, column = column_;
    char c = text_[pos_];
    auto make = [&](Tok type, std::string text) {
      Token t;
      t.type = type;
      t.text = std::move(text);
      t.span = {begin, pos_, line, column};
      return t;
    };
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        advance();
      return make(Tok::Ident, std::string(text_.substr(begin, pos_ - begin)));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long long value = 0;
      bool overflow = false;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        value = value * 10 + (text_[pos_] - '0');
        if (value > 1000000000) overflow = true;
        advance();
      }
      Token t = make(Tok::Int, std::string(text_.substr(begin, pos_ - begin)));
      t.value = value;
      if (overflow) {
        diags_.push_back({Severity::Error, "integer literal too large", t.span});
        throw ParseAbort{};
      }
      return t;
    }
    advance();
    switch (c) {
      case '{': return make(Tok::LBrace, "{");
      case '}': return make(Tok::RBrace, "}");
      case '[': return make(Tok::LBracket, "[");
      case ']': return make(Tok::RBracket, "]");
      case '(': return make(Tok::LParen, "(");
      case ')': return make(Tok::RParen, ")");
      case ',': return make(Tok::Comma, ",");
      case ':': return make(Tok::Colon, ":");
      case '^': return make(Tok::Caret, "^");
      case '+': return make(Tok::Plus, "+");
      case '*': return make(Tok::Star, "*");
      case '=':
        if (pos_ < text_.size() && text_[pos_] == '=') {
          advance();
          return make(Tok::EqEq, "==");
        }
        return make(Tok::Assign, "=");
      case '<':
        if (pos_ < text_.size() && text_[pos_] == '=') {
          advance();
          return make(Tok::Le, "<=");
        }
        return make(Tok::Lt, "<");
      case '>':
        if (pos_ < text_.size() && text_[pos_] == '=') {
          advance();
          return make(Tok::Ge, ">=");
        }
        return make(Tok::Gt, ">");
      default: {
        Token t = make(Tok::End, std::string(1, c));
        diags_.push_back({Severity::Error, std::string("unexpected character '") + c + "'", t.span});
        throw ParseAbort{};
      }
    }
  }

  std::string_view text_;
  std::vector<ParseDiagnostic>& diags_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

struct PendingUnit {
  StructuralUnit unit;
  SourceSpan span;
};

struct PendingAnno {
  char letter = 'm';
  std::string id;
  long long value = 0;
  SourceSpan span;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<ParseDiagnostic>& diags)
      : tokens_(std::move(tokens)), diags_(diags) {}

  Document parse_file() {
    Document doc;
    expect_keyword("net");
    parse_net_block(doc.net);
    if (peek().type == Tok::Ident && peek().text == "rules") {
      next();
      parse_rules_block(doc.rules, doc.net);
    }
    if (peek().type != Tok::End) fail(peek().span, "unexpected trailing input");
    return doc;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  [[noreturn]] void fail(const SourceSpan& span, const std::string& message) {
    diags_.push_back({Severity::Error, message, span});
    throw ParseAbort{};
  }

  Token expect(Tok type, const char* what) {
    if (peek().type != type) fail(peek().span, std::string("expected ") + what);
    return next();
  }

  void expect_keyword(const char* word) {
    if (peek().type != Tok::Ident || peek().text != word)
      fail(peek().span, std::string("expected '") + word + "'");
    next();
  }

  int expect_int(const char* what, long long min_value, long long max_value = 1000000000) {
    Token t = expect(Tok::Int, what);
    if (t.value < min_value || t.value > max_value)
      fail(t.span, std::string(what) + " out of range");
    return static_cast<int>(t.value);
  }

  std::string expect_ident(const char* what) { return expect(Tok::Ident, what).text; }

  static std::optional<UnitKind> kind_of(const std::string& word) {
    if (word == "C") return UnitKind::C;
    if (word == "I") return UnitKind::I;
    if (word == "B") return UnitKind::B;
    if (word == "A") return UnitKind::A;
    return {};
  }

  bool at_unit() const {
    return peek().type == Tok::Ident && kind_of(peek().text) && peek(1).type == Tok::LBracket;
  }

  bool at_anno() const {
    return peek().type == Tok::Ident && peek().text.size() == 1 &&
           (peek().text[0] == 'm' || peek().text[0] == 'v' || peek().text[0] == 'd') &&
           peek(1).type == Tok::LParen;
  }

  PendingUnit parse_unit() {
    Token kw = next();
    UnitKind kind = *kind_of(kw.text);
    expect(Tok::LBracket, "'['");
    std::string first = expect_ident("identifier");
    expect(Tok::Comma, "','");
    std::string second = expect_ident("identifier");
    Token close = expect(Tok::RBracket, "']'");
    StructuralUnit unit;
    unit.kind = kind;
    if (kind == UnitKind::I) {
      unit.transition = first;
      unit.position = second;
    } else {
      unit.position = first;
      unit.transition = second;
    }
    SourceSpan span{kw.span.begin, close.span.end, kw.span.line, kw.span.column};
    if (unit.position == unit.transition)
      fail(span, "'" + unit.position + "' used as both position and transition");
    if (peek().type == Tok::Caret) {
      next();
      unit.multiplicity = expect_int("multiplicity", 1);
    }
    if (peek().type == Tok::Ident && peek().text == "k" && peek(1).type == Tok::Assign) {
      next();
      next();
      unit.threshold = expect_int("threshold", 1);
    }
    return {std::move(unit), span};
  }

  void parse_net_block(PetriNet& net) {
    expect(Tok::LBrace, "'{'");
    std::vector<PendingUnit> units;
    std::vector<PendingAnno> annos;
    while (peek().type != Tok::RBrace) {
      if (peek().type == Tok::End) fail(peek().span, "unterminated net block");
      if (at_unit()) {
        units.push_back(parse_unit());
      } else if (at_anno()) {
        PendingAnno anno;
        Token kw = next();
        anno.letter = kw.text[0];
        expect(Tok::LParen, "'('");
        anno.id = expect_ident("identifier");
        expect(Tok::RParen, "')'");
        expect(Tok::Assign, "'='");
        long long min_value = anno.letter == 'v' ? 1 : 0;
        anno.value = expect_int("annotation value", min_value);
        anno.span = kw.span;
        annos.push_back(std::move(anno));
      } else {
        fail(peek().span, "expected a unit, an annotation or '}'");
      }
    }
    next();  // '}'

    for (const PendingUnit& pu : units) {
      try {
        net.add_unit(pu.unit);
      } catch (const Error& e) {
        fail(pu.span, e.what());
      }
    }
    std::set<std::pair<char, std::string>> seen;
    for (const PendingAnno& anno : annos) {
      if (!seen.insert({anno.letter, anno.id}).second)
        fail(anno.span, std::string("duplicate annotation ") + anno.letter + "(" + anno.id + ")");
      try {
        switch (anno.letter) {
          case 'm':
            net.set_marking(anno.id, static_cast<int>(anno.value));
            break;
          case 'v':
            net.set_speed(anno.id, static_cast<int>(anno.value));
            break;
          case 'd':
            net.set_delay(anno.id, static_cast<int>(anno.value));
            break;
        }
      } catch (const Error& e) {
        fail(anno.span, e.what());
      }
    }
  }

  Condition parse_condition() {
    Condition cond;
    while (true) {
      ConditionTerm term;
      if (peek().type == Tok::Int) {
        term.coefficient = expect_int("coefficient", 1);
        expect(Tok::Star, "'*'");
      }
      Token fn = expect(Tok::Ident, "'m' or 'v'");
      if (fn.text == "m")
        term.speed = false;
      else if (fn.text == "v")
        term.speed = true;
      else
        fail(fn.span, "conditions may only reference m(...) or v(...)");
      expect(Tok::LParen, "'('");
      term.node = expect_ident("identifier");
      expect(Tok::RParen, "')'");
      cond.terms.push_back(std::move(term));
      if (peek().type == Tok::Plus) {
        next();
        continue;
      }
      break;
    }
    switch (peek().type) {
      case Tok::Lt: cond.cmp = Comparator::Lt; break;
      case Tok::Le: cond.cmp = Comparator::Le; break;
      case Tok::EqEq: cond.cmp = Comparator::Eq; break;
      case Tok::Ge: cond.cmp = Comparator::Ge; break;
      case Tok::Gt: cond.cmp = Comparator::Gt; break;
      default: fail(peek().span, "expected a comparison operator");
    }
    next();
    cond.threshold = expect_int("threshold", 0);
    return cond;
  }

  std::map<std::string, int> parse_alloc_list(const char* what) {
    std::map<std::string, int> out;
    expect(Tok::LBrace, "'{'");
    while (true) {
      Token id = expect(Tok::Ident, "identifier");
      expect(Tok::Colon, "':'");
      int amount = expect_int(what, 1);
      if (!out.emplace(id.text, amount).second)
        fail(id.span, "duplicate entry '" + id.text + "'");
      if (peek().type == Tok::Comma) {
        next();
        continue;
      }
      break;
    }
    expect(Tok::RBrace, "'}'");
    return out;
  }

  ReleasePolicy parse_release() {
    ReleasePolicy policy;
    expect(Tok::LBrace, "'{'");
    Token first = expect(Tok::Ident, "identifier or nearest_* keyword");
    if (first.text == "nearest_predecessor" || first.text == "nearest_successor") {
      policy.mode = first.text == "nearest_predecessor" ? ReleaseMode::NearestPredecessor
                                                        : ReleaseMode::NearestSuccessor;
      expect(Tok::RBrace, "'}'");
      return policy;
    }
    policy.mode = ReleaseMode::Explicit;
    expect(Tok::Colon, "':'");
    std::set<std::string> seen{first.text};
    ReleaseShare share;
    share.position = first.text;
    if (peek().type == Tok::Ident && peek().text == "all") {
      next();
      share.all = true;
      policy.shares.push_back(std::move(share));
      if (peek().type == Tok::Comma)
        fail(peek().span, "'all' must be the sole release target");
      expect(Tok::RBrace, "'}'");
      return policy;
    }
    share.ratio = expect_int("release ratio", 1);
    policy.shares.push_back(std::move(share));
    while (peek().type == Tok::Comma) {
      next();
      Token id = expect(Tok::Ident, "identifier");
      if (!seen.insert(id.text).second) fail(id.span, "duplicate release target '" + id.text + "'");
      expect(Tok::Colon, "':'");
      ReleaseShare extra;
      extra.position = id.text;
      extra.ratio = expect_int("release ratio", 1);
      policy.shares.push_back(std::move(extra));
    }
    expect(Tok::RBrace, "'}'");
    return policy;
  }

  void parse_rules_block(std::vector<CreativeRule>& rules, const PetriNet& net) {
    (void)net;
    expect(Tok::LBrace, "'{'");
    while (peek().type != Tok::RBrace) {
      if (peek().type == Tok::End) fail(peek().span, "unterminated rules block");
      Token when = peek();
      expect_keyword("when");
      CreativeRule rule;
      rule.condition = parse_condition();
      Token action = expect(Tok::Ident, "'spawn' or 'remove'");
      if (action.text == "spawn")
        rule.action = RuleAction::Spawn;
      else if (action.text == "remove")
        rule.action = RuleAction::Remove;
      else
        fail(action.span, "expected 'spawn' or 'remove'");
      expect(Tok::LBrace, "'{'");
      while (peek().type != Tok::RBrace) {
        if (!at_unit()) fail(peek().span, "expected a unit or '}'");
        rule.complex.push_back(parse_unit().unit);
      }
      next();  // '}'
      if (rule.complex.empty()) fail(action.span, "empty complex");

      if (peek().type == Tok::Ident && peek().text == "cost") {
        next();
        rule.cost = parse_alloc_list("cost amount");
      }
      if (peek().type == Tok::Ident && peek().text == "init") {
        Token kw = next();
        if (rule.action == RuleAction::Remove) fail(kw.span, "remove rules cannot take init");
        rule.init = parse_alloc_list("init amount");
        long long cost_total = 0, init_total = 0;
        for (const auto& [id, v] : rule.cost) { (void)id; cost_total += v; }
        for (const auto& [id, v] : rule.init) { (void)id; init_total += v; }
        if (init_total > cost_total)
          fail(kw.span, "init total exceeds cost total (" + std::to_string(init_total) + " > " +
                            std::to_string(cost_total) + ")");
        for (const auto& [id, v] : rule.init) {
          (void)v;
          bool created = false;
          for (const StructuralUnit& u : rule.complex)
            if (u.position == id) { created = true; break; }
          if (!created)
            fail(kw.span, "init target '" + id + "' is not a position of the spawned complex");
        }
      }
      if (peek().type == Tok::Ident && peek().text == "release") {
        Token kw = next();
        if (rule.action == RuleAction::Spawn) fail(kw.span, "spawn rules cannot take release");
        if (!rule.cost.empty())
          fail(kw.span, "deletion options are exclusive: cost and release cannot be combined");
        rule.release = parse_release();
      }
      (void)when;
      rules.push_back(std::move(rule));
    }
    next();  // '}'
  }

  std::vector<Token> tokens_;
  std::vector<ParseDiagnostic>& diags_;
  size_t pos_ = 0;
};

}  // namespace

ParseResult parse_net(std::string_view text) {
  ParseResult result;
  try {
    Lexer lexer(text, result.diagnostics);
    Parser parser(lexer.tokenize(), result.diagnostics);
    result.document = parser.parse_file();
  } catch (const ParseAbort&) {
    result.document.reset();
  }
  return result;
}

}  // namespace cpn
