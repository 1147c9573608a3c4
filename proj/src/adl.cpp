#include "uam/adl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace uam::adl {

Value Value::num(double v) {
  Value out;
  out.kind = Kind::Number;
  out.number = v;
  return out;
}

Value Value::ident(std::string s) {
  Value out;
  out.kind = Kind::Ident;
  out.text = std::move(s);
  return out;
}

Value Value::str(std::string s) {
  Value out;
  out.kind = Kind::String;
  out.text = std::move(s);
  return out;
}

Value Value::list(std::vector<Value> items) {
  Value out;
  out.kind = Kind::List;
  out.items = std::move(items);
  return out;
}

bool Value::operator==(const Value& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Number:
      return number == other.number;
    case Kind::Ident:
    case Kind::String:
      return text == other.text;
    case Kind::List:
      return items == other.items;
  }
  return false;
}

const Value* Object::field(const std::string& key) const {
  for (const auto& f : fields) {
    if (f.key == key) return &f.value;
  }
  return nullptr;
}

const Section* Document::section(const std::string& name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

namespace {

bool same_entries(const std::vector<KeyValue>& a, const std::vector<KeyValue>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].key != b[i].key || !(a[i].value == b[i].value)) return false;
  }
  return true;
}

bool same_objects(const std::vector<Object>& a, const std::vector<Object>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].kind != b[i].kind ||
        !same_entries(a[i].fields, b[i].fields)) {
      return false;
    }
  }
  return true;
}

bool same_gates(const std::vector<GateDecl>& a, const std::vector<GateDecl>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].op != b[i].op || a[i].k != b[i].k ||
        a[i].children != b[i].children) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool Document::operator==(const Document& other) const {
  if (sections.size() != other.sections.size()) return false;
  for (size_t i = 0; i < sections.size(); ++i) {
    const Section& a = sections[i];
    const Section& b = other.sections[i];
    if (a.name != b.name) return false;
    if (!same_entries(a.entries, b.entries)) return false;
    if (!same_objects(a.objects, b.objects)) return false;
    if (a.trees.size() != b.trees.size()) return false;
    for (size_t t = 0; t < a.trees.size(); ++t) {
      const TreeDecl& ta = a.trees[t];
      const TreeDecl& tb = b.trees[t];
      if (ta.id != tb.id || !same_entries(ta.fields, tb.fields) ||
          !same_objects(ta.events, tb.events) || !same_gates(ta.gates, tb.gates)) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
  End,
  Newline,
  Ident,
  Number,
  String,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Equals,
  Colon,
  Comma,
  Semicolon,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  SourceSpan span;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Newline: return "end of line";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Equals: return "'='";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Semicolon: return "';'";
  }
  return "?";
}

class Lexer {
 public:
  Lexer(const std::string& text, std::string filename)
      : text_(text), file_(std::move(filename)) {
    // Tolerate and strip a UTF-8 BOM.
    if (text_.size() >= 3 && static_cast<unsigned char>(text_[0]) == 0xEF &&
        static_cast<unsigned char>(text_[1]) == 0xBB &&
        static_cast<unsigned char>(text_[2]) == 0xBF) {
      pos_ = 3;
      col_ = 1;
    }
  }

  Token next() {
    skip_blanks_and_comments();
    Token tok;
    tok.span = {file_, line_, col_};
    if (pos_ >= text_.size()) {
      tok.kind = Tok::End;
      return tok;
    }
    char c = text_[pos_];
    if (c == '\n') {
      advance();
      tok.kind = Tok::Newline;
      return tok;
    }
    if (c == '"') {
      return lex_string(tok);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      return lex_number(tok);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
          advance();
        } else {
          break;
        }
      }
      tok.kind = Tok::Ident;
      tok.text = text_.substr(start, pos_ - start);
      return tok;
    }
    switch (c) {
      case '[': tok.kind = Tok::LBracket; break;
      case ']': tok.kind = Tok::RBracket; break;
      case '{': tok.kind = Tok::LBrace; break;
      case '}': tok.kind = Tok::RBrace; break;
      case '(': tok.kind = Tok::LParen; break;
      case ')': tok.kind = Tok::RParen; break;
      case '=': tok.kind = Tok::Equals; break;
      case ':': tok.kind = Tok::Colon; break;
      case ',': tok.kind = Tok::Comma; break;
      case ';': tok.kind = Tok::Semicolon; break;
      default:
        tok.kind = Tok::Ident;
        tok.text = std::string(1, c);
        advance();
        return tok;  // parser reports it as unexpected
    }
    advance();
    return tok;
  }

 private:
  void advance() {
    if (pos_ < text_.size()) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_blanks_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token lex_string(Token tok) {
    advance();  // opening quote
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') {
      char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size()) {
        advance();
        out.push_back(text_[pos_]);
      } else {
        out.push_back(c);
      }
      advance();
    }
    if (pos_ < text_.size() && text_[pos_] == '"') advance();
    tok.kind = Tok::String;
    tok.text = std::move(out);
    return tok;
  }

  Token lex_number(Token tok) {
    size_t start = pos_;
    auto digit = [&]() {
      return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
    };
    if (text_[pos_] == '-' || text_[pos_] == '+') advance();
    while (digit()) advance();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      while (digit()) advance();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      advance();
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) advance();
      while (digit()) advance();
    }
    tok.kind = Tok::Number;
    tok.text = text_.substr(start, pos_ - start);
    tok.number = std::strtod(tok.text.c_str(), nullptr);
    return tok;
  }

  const std::string& text_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

constexpr int kMaxErrors = 10;

class Parser {
 public:
  Parser(const std::string& text, const std::string& filename)
      : lexer_(text, filename) {
    shift();
  }

  ParseResult run() {
    ParseResult result;
    skip_newlines();
    while (cur_.kind != Tok::End) {
      if (cur_.kind == Tok::LBracket) {
        parse_section(result);
      } else {
        error("expected section header", {"'['"});
        recover_to_section();
      }
      skip_newlines();
    }
    finalize_sections(result);
    result.errors = errors_;
    return result;
  }

 private:
  void shift() { cur_ = lexer_.next(); }

  void skip_newlines() {
    while (cur_.kind == Tok::Newline) shift();
  }

  void error(const std::string& message, std::vector<std::string> expected = {}) {
    if (static_cast<int>(errors_.size()) < kMaxErrors) {
      errors_.push_back({cur_.span, message, std::move(expected)});
    }
  }

  void error_at(SourceSpan span, const std::string& message,
                std::vector<std::string> expected = {}) {
    if (static_cast<int>(errors_.size()) < kMaxErrors) {
      errors_.push_back({std::move(span), message, std::move(expected)});
    }
  }

  // Skip until the next '[' that starts a line, or end of input.
  void recover_to_section() {
    bool at_line_start = false;
    while (cur_.kind != Tok::End) {
      if (cur_.kind == Tok::Newline) {
        at_line_start = true;
        shift();
        continue;
      }
      if (at_line_start && cur_.kind == Tok::LBracket) return;
      at_line_start = false;
      shift();
    }
  }

  bool expect(Tok kind) {
    if (cur_.kind == kind) {
      shift();
      return true;
    }
    error(std::string("expected ") + tok_name(kind) + ", found " + tok_name(cur_.kind),
          {tok_name(kind)});
    return false;
  }

  void parse_section(ParseResult& result) {
    Section section;
    section.span = cur_.span;
    shift();  // '['
    if (cur_.kind != Tok::Ident) {
      error("expected section name", {"identifier"});
      recover_to_section();
      return;
    }
    section.name = cur_.text;
    shift();
    if (!expect(Tok::RBracket)) {
      recover_to_section();
      return;
    }
    for (const auto& existing : result.document.sections) {
      if (existing.name == section.name) {
        error_at(section.span, "duplicate section '" + section.name + "'");
        recover_to_section();
        return;
      }
    }
    skip_newlines();
    while (cur_.kind != Tok::End && cur_.kind != Tok::LBracket) {
      if (!parse_entry(section)) {
        recover_to_section();
        break;
      }
      skip_newlines();
    }
    result.document.sections.push_back(std::move(section));
  }

  bool parse_entry(Section& section) {
    if (cur_.kind != Tok::Ident) {
      error("expected entry", {"identifier"});
      return false;
    }
    if (cur_.text == "gate") {
      return parse_gate(section);
    }
    Token first = cur_;
    shift();
    if (cur_.kind == Tok::Colon) {
      shift();
      KeyValue kv;
      kv.key = first.text;
      kv.span = first.span;
      if (!parse_value(kv.value, /*to_eol=*/true)) return false;
      section.entries.push_back(std::move(kv));
      return true;
    }
    if (cur_.kind == Tok::Ident) {
      Object obj;
      obj.id = first.text;
      obj.kind = cur_.text;
      obj.span = first.span;
      shift();
      if (!parse_object_body(obj)) return false;
      attach_object(section, std::move(obj));
      return true;
    }
    error("expected ':' or object kind after '" + first.text + "'",
          {"':'", "identifier"});
    return false;
  }

  void attach_object(Section& section, Object obj) {
    if (section.name == "fault_trees") {
      if (obj.kind == "tree") {
        TreeDecl tree;
        tree.id = obj.id;
        tree.fields = std::move(obj.fields);
        tree.span = obj.span;
        section.trees.push_back(std::move(tree));
        return;
      }
      if (obj.kind == "event") {
        if (section.trees.empty()) {
          error_at(obj.span, "event '" + obj.id + "' declared before any tree");
          return;
        }
        section.trees.back().events.push_back(std::move(obj));
        return;
      }
      error_at(obj.span, "unexpected object kind '" + obj.kind +
                             "' in [fault_trees]", {"tree", "event", "gate"});
      return;
    }
    section.objects.push_back(std::move(obj));
  }

  bool parse_object_body(Object& obj) {
    if (!expect(Tok::LBrace)) return false;
    skip_newlines();
    while (cur_.kind != Tok::RBrace) {
      if (cur_.kind == Tok::End) {
        error("unterminated object '" + obj.id + "'", {"'}'"});
        return false;
      }
      if (cur_.kind != Tok::Ident) {
        error("expected field name", {"identifier", "'}'"});
        return false;
      }
      KeyValue kv;
      kv.key = cur_.text;
      kv.span = cur_.span;
      shift();
      if (!expect(Tok::Equals)) return false;
      if (!parse_value(kv.value, /*to_eol=*/false)) return false;
      obj.fields.push_back(std::move(kv));
      skip_newlines();
    }
    shift();  // '}'
    return true;
  }

  bool parse_gate(Section& section) {
    SourceSpan gate_span = cur_.span;
    shift();  // 'gate'
    if (cur_.kind != Tok::Ident) {
      error("expected gate id", {"identifier"});
      return false;
    }
    GateDecl gate;
    gate.id = cur_.text;
    gate.span = gate_span;
    shift();
    if (!expect(Tok::Equals)) return false;
    if (cur_.kind != Tok::Ident ||
        (cur_.text != "AND" && cur_.text != "OR" && cur_.text != "KOFN")) {
      error("expected gate operator", {"AND", "OR", "KOFN"});
      return false;
    }
    gate.op = cur_.text;
    shift();
    if (!expect(Tok::LParen)) return false;
    if (gate.op == "KOFN") {
      if (cur_.kind != Tok::Number) {
        error("expected k for KOFN gate", {"number"});
        return false;
      }
      gate.k = static_cast<int>(cur_.number);
      shift();
      if (!expect(Tok::Semicolon)) return false;
    }
    while (true) {
      if (cur_.kind != Tok::Ident) {
        error("expected child reference", {"identifier"});
        return false;
      }
      gate.children.push_back(cur_.text);
      child_spans_[gate.id].push_back(cur_.span);
      shift();
      if (cur_.kind == Tok::Comma) {
        shift();
        continue;
      }
      break;
    }
    if (!expect(Tok::RParen)) return false;
    if (section.name != "fault_trees" || section.trees.empty()) {
      error_at(gate.span, "gate '" + gate.id + "' declared outside a tree");
      return false;
    }
    section.trees.back().gates.push_back(std::move(gate));
    return true;
  }

  bool parse_value(Value& out, bool to_eol) {
    std::vector<Value> items;
    while (true) {
      Value item;
      if (cur_.kind == Tok::Number) {
        item = Value::num(cur_.number);
      } else if (cur_.kind == Tok::Ident) {
        item = Value::ident(cur_.text);
      } else if (cur_.kind == Tok::String) {
        item = Value::str(cur_.text);
      } else {
        error("expected value", {"number", "identifier", "string"});
        return false;
      }
      shift();
      items.push_back(std::move(item));
      if (cur_.kind == Tok::Comma) {
        shift();
        if (cur_.kind == Tok::Newline && to_eol) shift();  // allow wrapped lists
        continue;
      }
      break;
    }
    if (to_eol && cur_.kind != Tok::Newline && cur_.kind != Tok::End) {
      error("unexpected trailing token after value", {"end of line"});
      return false;
    }
    out = items.size() == 1 ? std::move(items.front()) : Value::list(std::move(items));
    return true;
  }

  // Sort entries into canonical order and check gate references so that
  // parse() output is already canonical.
  void finalize_sections(ParseResult& result) {
    for (auto& section : result.document.sections) {
      std::stable_sort(section.entries.begin(), section.entries.end(),
                       [](const KeyValue& a, const KeyValue& b) { return a.key < b.key; });
      std::stable_sort(section.objects.begin(), section.objects.end(),
                       [](const Object& a, const Object& b) { return a.id < b.id; });
      std::stable_sort(section.trees.begin(), section.trees.end(),
                       [](const TreeDecl& a, const TreeDecl& b) { return a.id < b.id; });
      for (auto& tree : section.trees) {
        std::stable_sort(tree.fields.begin(), tree.fields.end(),
                         [](const KeyValue& a, const KeyValue& b) { return a.key < b.key; });
        std::stable_sort(tree.events.begin(), tree.events.end(),
                         [](const Object& a, const Object& b) { return a.id < b.id; });
        std::stable_sort(tree.gates.begin(), tree.gates.end(),
                         [](const GateDecl& a, const GateDecl& b) { return a.id < b.id; });
        check_tree_references(tree);
      }
    }
    std::stable_sort(result.document.sections.begin(), result.document.sections.end(),
                     [](const Section& a, const Section& b) {
                       return section_rank(a.name) < section_rank(b.name) ||
                              (section_rank(a.name) == section_rank(b.name) &&
                               a.name < b.name);
                     });
  }

  static int section_rank(const std::string& name) {
    static const std::vector<std::string> order = {
        "components", "architecture", "fault_trees", "allocation",
        "mission",    "cells",        "thermal",     "fha",
        "powertrain"};
    for (size_t i = 0; i < order.size(); ++i) {
      if (order[i] == name) return static_cast<int>(i);
    }
    return static_cast<int>(order.size());
  }

  void check_tree_references(const TreeDecl& tree) {
    std::set<std::string> declared;
    for (const auto& ev : tree.events) declared.insert(ev.id);
    for (const auto& g : tree.gates) declared.insert(g.id);
    for (const auto& g : tree.gates) {
      const auto& spans = child_spans_[g.id];
      for (size_t i = 0; i < g.children.size(); ++i) {
        if (declared.count(g.children[i]) == 0) {
          SourceSpan span = i < spans.size() ? spans[i] : g.span;
          error_at(span, "unknown event '" + g.children[i] + "' in gate '" + g.id + "'");
        }
      }
    }
  }

  Lexer lexer_;
  Token cur_;
  std::vector<ParseError> errors_;
  std::map<std::string, std::vector<SourceSpan>> child_spans_;
};

}  // namespace

ParseResult parse(const std::string& text, const std::string& filename) {
  Parser parser(text, filename);
  return parser.run();
}

// ---------------------------------------------------------------------------
// Canonical serialization

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  double mag = std::fabs(value);
  if (mag < 1e-3) {
    std::snprintf(buf, sizeof(buf), "%.5e", value);
    std::string s(buf);
    auto epos = s.find('e');
    std::string mantissa = s.substr(0, epos);
    std::string exponent = s.substr(epos + 1);
    // trim trailing zeros of the mantissa
    while (!mantissa.empty() && mantissa.back() == '0') mantissa.pop_back();
    if (!mantissa.empty() && mantissa.back() == '.') mantissa.pop_back();
    // normalize exponent: drop '+' and leading zeros
    bool neg = false;
    size_t i = 0;
    if (exponent[i] == '+' || exponent[i] == '-') {
      neg = exponent[i] == '-';
      ++i;
    }
    while (i + 1 < exponent.size() && exponent[i] == '0') ++i;
    return mantissa + "e" + (neg ? "-" : "") + exponent.substr(i);
  }
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  std::string s(buf);
  auto epos = s.find('e');
  if (epos != std::string::npos) {
    std::string mantissa = s.substr(0, epos);
    std::string exponent = s.substr(epos + 1);
    bool neg = false;
    size_t i = 0;
    if (exponent[i] == '+' || exponent[i] == '-') {
      neg = exponent[i] == '-';
      ++i;
    }
    while (i + 1 < exponent.size() && exponent[i] == '0') ++i;
    s = mantissa + "e" + (neg ? "-" : "") + exponent.substr(i);
  }
  return s;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_value(std::ostream& os, const Value& v) {
  switch (v.kind) {
    case Value::Kind::Number:
      os << format_number(v.number);
      break;
    case Value::Kind::Ident:
      os << v.text;
      break;
    case Value::Kind::String:
      os << quote(v.text);
      break;
    case Value::Kind::List:
      for (size_t i = 0; i < v.items.size(); ++i) {
        if (i != 0) os << ", ";
        write_value(os, v.items[i]);
      }
      break;
  }
}

void write_object(std::ostream& os, const Object& obj, const char* kind_override = nullptr) {
  os << obj.id << " " << (kind_override != nullptr ? kind_override : obj.kind.c_str())
     << " {";
  for (const auto& f : obj.fields) {
    os << " " << f.key << " = ";
    write_value(os, f.value);
  }
  os << " }\n";
}

void write_gate(std::ostream& os, const GateDecl& gate) {
  os << "gate " << gate.id << " = " << gate.op << "(";
  if (gate.op == "KOFN") os << gate.k << "; ";
  for (size_t i = 0; i < gate.children.size(); ++i) {
    if (i != 0) os << ", ";
    os << gate.children[i];
  }
  os << ")\n";
}

}  // namespace

std::string serialize(const Document& doc) {
  std::ostringstream os;
  bool first = true;
  for (const auto& section : doc.sections) {
    if (!first) os << "\n";
    first = false;
    os << "[" << section.name << "]\n";
    for (const auto& kv : section.entries) {
      os << kv.key << ": ";
      write_value(os, kv.value);
      os << "\n";
    }
    for (const auto& obj : section.objects) {
      write_object(os, obj);
    }
    for (const auto& tree : section.trees) {
      Object header;
      header.id = tree.id;
      header.fields = tree.fields;
      write_object(os, header, "tree");
      for (const auto& ev : tree.events) write_object(os, ev);
      for (const auto& gate : tree.gates) write_gate(os, gate);
    }
  }
  return os.str();
}

}  // namespace uam::adl
