#pragma once

// Architecture Description Language: a line-oriented textual format covering
// components, fault trees, battery allocation, missions, cell specs and
// thermal calibration. See docs/adl-grammar.ebnf for the exact grammar.
//
// The parser is pure (no environment reads) and reports diagnostics with
// source spans; it recovers at the next section header and reports up to
// ten errors per run. serialize() emits the canonical form: sorted ids,
// numbers with up to 6 significant digits, scientific notation below 1e-3.
// Canonical output is byte-stable, so golden tests may compare it directly.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace uam::adl {

struct SourceSpan {
  std::string file;
  int line = 1;    // 1-based
  int column = 1;  // 1-based
};

struct ParseError {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;  // expected tokens, may be empty
};

// Scalar or list value on the right-hand side of `key: value` / `key = value`.
struct Value {
  enum class Kind { Number, Ident, String, List };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string text;           // Ident / String payload
  std::vector<Value> items;   // List payload

  static Value num(double v);
  static Value ident(std::string s);
  static Value str(std::string s);
  static Value list(std::vector<Value> items);

  bool operator==(const Value& other) const;
};

struct KeyValue {
  std::string key;
  Value value;
  SourceSpan span;
};

// `id Kind { field = value ... }`
struct Object {
  std::string id;
  std::string kind;
  std::vector<KeyValue> fields;
  SourceSpan span;

  const Value* field(const std::string& key) const;
};

// `gate <id> = AND(a, b)` / `OR(...)` / `KOFN(k; a, b, ...)`
struct GateDecl {
  std::string id;
  std::string op;  // "AND" | "OR" | "KOFN"
  int k = 0;       // KOFN only
  std::vector<std::string> children;
  SourceSpan span;
};

// One `tree id { ... }` block with the events and gates declared after it.
struct TreeDecl {
  std::string id;
  std::vector<KeyValue> fields;
  std::vector<Object> events;  // kind == "event"
  std::vector<GateDecl> gates;
  SourceSpan span;
};

struct Section {
  std::string name;
  std::vector<KeyValue> entries;
  std::vector<Object> objects;
  std::vector<TreeDecl> trees;  // only for [fault_trees]
  SourceSpan span;
};

struct Document {
  std::vector<Section> sections;

  const Section* section(const std::string& name) const;
  bool operator==(const Document& other) const;
};

struct ParseResult {
  Document document;
  std::vector<ParseError> errors;  // empty on success

  bool ok() const { return errors.empty(); }
};

ParseResult parse(const std::string& text, const std::string& filename = "<input>");

std::string serialize(const Document& doc);

// Canonical number formatting shared with the serializer: up to 6 significant
// digits, scientific notation for 0 < |x| < 1e-3, exponent without padding
// (9.31e-5, not 9.31e-05).
std::string format_number(double value);

}  // namespace uam::adl
