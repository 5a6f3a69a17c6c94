// Copyright 2026 The repodsl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repodsl/toydsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

#include "repodsl/error.hpp"

namespace repodsl::dsl {
using nlohmann::json;

namespace {

enum class TokKind { kIdent, kLBrace, kRBrace, kColon, kScope, kEquals, kOther, kEnd };

struct Token {
  TokKind kind;
  std::string text;
  int line;
};

bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> Lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (IsIdentChar(c)) {
      size_t j = i;
      while (j < src.size() && IsIdentChar(src[j])) ++j;
      out.push_back({TokKind::kIdent, std::string(src.substr(i, j - i)), line});
      i = j;
    } else if (c == ':' && i + 1 < src.size() && src[i + 1] == ':') {
      out.push_back({TokKind::kScope, "::", line});
      i += 2;
    } else {
      TokKind kind = TokKind::kOther;
      switch (c) {
        case '{': kind = TokKind::kLBrace; break;
        case '}': kind = TokKind::kRBrace; break;
        case ':': kind = TokKind::kColon; break;
        case '=': kind = TokKind::kEquals; break;
        default: break;
      }
      // Keep a whole UTF-8 sequence together for readable messages.
      size_t j = i + 1;
      while (j < src.size() && (static_cast<unsigned char>(src[j]) & 0xC0) == 0x80) ++j;
      out.push_back({kind, std::string(src.substr(i, j - i)), line});
      i = j;
    }
  }
  out.push_back({TokKind::kEnd, "end of file", line});
  return out;
}

struct ParseFailure {
  int line;
  std::string message;
};

class Parser {
 public:
  Parser(std::string_view content, std::string_view key)
      : tokens_(Lex(content)), key_(key), layer_(LayerOf(key)) {}

  ParseResult Run() {
    ParseResult result;
    while (Peek().kind != TokKind::kEnd) {
      if (!IsKeyword(Peek(), "entity")) {
        Report(result, {Peek().line, "expected 'entity', found '" + Peek().text + "'"});
        SkipToEntity(pos_ + 1);
        continue;
      }
      const size_t start = pos_;
      try {
        result.entities.push_back(ParseEntity());
      } catch (const ParseFailure& failure) {
        Report(result, failure);
        SkipToEntity(start + 1);
      }
    }
    return result;
  }

 private:
  static bool IsKeyword(const Token& t, std::string_view word) {
    return t.kind == TokKind::kIdent && t.text == word;
  }

  const Token& Peek(size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }

  const Token& Next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void Fail(const Token& at, const std::string& expected) const {
    throw ParseFailure{at.line, "expected " + expected + ", found '" + at.text + "'"};
  }

  std::string ExpectName(const char* what) {
    const Token& t = Peek();
    if (t.kind != TokKind::kIdent || t.text == "entity") Fail(t, what);
    return Next().text;
  }

  void Expect(TokKind kind, const char* what) {
    if (Peek().kind != kind) Fail(Peek(), what);
    Next();
  }

  EntityDecl ParseEntity() {
    EntityDecl e;
    e.line = Next().line;  // "entity"
    e.source_key = key_;
    e.layer = layer_;
    if (IsKeyword(Peek(), "abstract") && Peek(1).kind == TokKind::kIdent &&
        Peek(1).text != "extends") {
      e.is_abstract = true;
      Next();
    }
    e.name = ExpectName("entity name");
    if (IsKeyword(Peek(), "extends")) {
      Next();
      e.parent = ExpectName("parent entity name after 'extends'");
    }
    Expect(TokKind::kLBrace, "'{'");
    while (Peek().kind != TokKind::kRBrace) {
      if (Peek().kind == TokKind::kEnd) Fail(Peek(), "'}' closing entity '" + e.name + "'");
      e.members.push_back(ParseMember());
    }
    Next();
    return e;
  }

  Member ParseMember() {
    Member m;
    m.line = Peek().line;
    m.name = ExpectName("member name");
    if (Peek().kind == TokKind::kColon) {
      Next();
      m.decl = TypedMember{ExpectName("type name after ':'")};
    } else if (Peek().kind == TokKind::kEquals) {
      Next();
      AssignedMember a;
      a.module = ExpectName("module name after '='");
      Expect(TokKind::kScope, "'::'");
      a.value = ExpectName("value after '::'");
      m.decl = std::move(a);
    } else {
      Fail(Peek(), "':' or '=' after member '" + m.name + "'");
    }
    return m;
  }

  void SkipToEntity(size_t from) {
    pos_ = std::min(from, tokens_.size() - 1);
    while (Peek().kind != TokKind::kEnd && !IsKeyword(Peek(), "entity")) Next();
  }

  void Report(ParseResult& result, const ParseFailure& failure) const {
    result.diagnostics.push_back(
        {Severity::kError, DiagCode::kSyntax, key_, failure.line, failure.message});
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  std::string key_;
  std::optional<Layer> layer_;
};

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string RenderStub(const EntityDecl& e) {
  std::string out = "// generated from " + e.source_key + ":" + std::to_string(e.line) + "\n";
  if (e.layer) out += "// layer: " + std::string(LayerName(*e.layer)) + "\n";
  out += e.is_abstract ? "abstract class " : "class ";
  out += e.name;
  if (e.parent) out += " extends " + *e.parent;
  out += "\n";
  if (e.members.empty()) return out;

  out += "\n";
  for (const Member& m : e.members) {
    out += "  const " + PropertyConstant(m.name) + " = \"" + m.name + "\"\n";
  }
  bool any_field = false;
  for (const Member& m : e.members) {
    if (!m.is_typed()) continue;
    if (!any_field) out += "\n";
    any_field = true;
    out += "  field " + m.name + ": " + std::get<TypedMember>(m.decl).type_name + "\n";
  }
  out += "\n";
  for (const Member& m : e.members) {
    if (const auto* t = std::get_if<TypedMember>(&m.decl)) {
      out += "  get " + m.name + "(): " + t->type_name + "\n";
      out += "  set " + m.name + "(value: " + t->type_name + ")\n";
    } else {
      const auto& a = std::get<AssignedMember>(m.decl);
      out += "  get " + m.name + "(): " + a.module + " = " + a.module + "::" + a.value + "\n";
    }
  }
  return out;
}

struct ParsedRepo {
  std::vector<EntityDecl> entities;
  std::vector<Diagnostic> diagnostics;
};

ParsedRepo ParseRepo(const repofs::RepoSnapshot& snapshot) {
  ParsedRepo repo;
  for (const auto& [key, content] : repofs::Flatten(snapshot)) {
    if (!EndsWith(key, ".dsl")) continue;
    ParseResult r = ParseDsl(content, key);
    std::move(r.entities.begin(), r.entities.end(), std::back_inserter(repo.entities));
    std::move(r.diagnostics.begin(), r.diagnostics.end(), std::back_inserter(repo.diagnostics));
  }
  return repo;
}

std::vector<Diagnostic> Resolve(ParsedRepo& repo, const TypeRegistry& registry) {
  std::vector<Diagnostic> diags = std::move(repo.diagnostics);
  auto add = [&diags](DiagCode code, const EntityDecl& e, int line, std::string msg) {
    diags.push_back({Severity::kError, code, e.source_key, line, std::move(msg)});
  };

  std::map<std::string, const EntityDecl*, std::less<>> declared;
  for (const EntityDecl& e : repo.entities) {
    auto [it, inserted] = declared.emplace(e.name, &e);
    if (!inserted) {
      add(DiagCode::kDuplicate, e, e.line,
          "entity '" + e.name + "' already declared at " + it->second->source_key + ":" +
              std::to_string(it->second->line));
    }
  }
  auto is_entity = [&](std::string_view name) {
    return declared.find(name) != declared.end() || registry.IsKnownEntity(name);
  };

  for (const EntityDecl& e : repo.entities) {
    if (e.parent && !is_entity(*e.parent)) {
      add(DiagCode::kUnknownParent, e, e.line,
          "entity '" + e.name + "' extends unknown entity '" + *e.parent + "'");
    }
    std::set<std::string, std::less<>> member_names;
    for (const Member& m : e.members) {
      if (!member_names.insert(m.name).second) {
        add(DiagCode::kDuplicate, e, m.line,
            "member '" + m.name + "' declared twice in entity '" + e.name + "'");
      }
      if (const auto* t = std::get_if<TypedMember>(&m.decl)) {
        if (e.layer == Layer::kTimeslices) {
          add(DiagCode::kLayerRule, e, m.line,
              "typed attribute '" + m.name + "' is not allowed in the timeslices layer "
              "(only Module::value assignments)");
        }
        if (!registry.IsKnownType(t->type_name) && !is_entity(t->type_name)) {
          add(DiagCode::kUnknownType, e, m.line,
              "attribute '" + m.name + "' has unknown type '" + t->type_name + "'");
        }
      } else {
        const auto& a = std::get<AssignedMember>(m.decl);
        if (!registry.IsKnownModule(a.module)) {
          add(DiagCode::kDanglingRef, e, m.line,
              "attribute '" + m.name + "' references unknown module '" + a.module + "'");
        } else if (!registry.IsKnownValue(a.module, a.value)) {
          add(DiagCode::kDanglingRef, e, m.line,
              "attribute '" + m.name + "' references unknown value '" + a.module + "::" +
                  a.value + "'");
        }
      }
    }
  }
  std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
    if (a.source_key != b.source_key) return a.source_key < b.source_key;
    return a.line < b.line;
  });
  return diags;
}

std::set<std::string, std::less<>> StringSet(const json& arr, const char* field) {
  if (!arr.is_array()) throw SchemaError(std::string("registry field '") + field + "' must be an array");
  std::set<std::string, std::less<>> out;
  for (const json& v : arr) {
    if (!v.is_string()) throw SchemaError(std::string("registry field '") + field + "' must hold strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::string_view LayerName(Layer layer) {
  switch (layer) {
    case Layer::kServer: return "server";
    case Layer::kUi: return "ui";
    case Layer::kTimeslices: return "timeslices";
  }
  return "?";
}

std::optional<Layer> LayerOf(std::string_view source_key) {
  size_t start = 0;
  while (start <= source_key.size()) {
    size_t slash = source_key.find('/', start);
    if (slash == std::string_view::npos) break;  // the file name is not a layer
    std::string_view seg = source_key.substr(start, slash - start);
    if (seg == "server") return Layer::kServer;
    if (seg == "ui") return Layer::kUi;
    if (seg == "timeslices" || seg == "time-slices" || seg == "time_slices") {
      return Layer::kTimeslices;
    }
    start = slash + 1;
  }
  return std::nullopt;
}

std::string_view SeverityName(Severity s) {
  return s == Severity::kError ? "error" : "warning";
}

std::string_view DiagCodeName(DiagCode c) {
  switch (c) {
    case DiagCode::kSyntax: return "SYNTAX";
    case DiagCode::kUnknownType: return "UNKNOWN_TYPE";
    case DiagCode::kUnknownParent: return "UNKNOWN_PARENT";
    case DiagCode::kDuplicate: return "DUPLICATE";
    case DiagCode::kLayerRule: return "LAYER_RULE";
    case DiagCode::kDanglingRef: return "DANGLING_REF";
  }
  return "?";
}

json Diagnostic::ToJson() const {
  return json{{"severity", SeverityName(severity)},
              {"code", DiagCodeName(code)},
              {"key", source_key},
              {"line", line},
              {"message", message}};
}

ParseResult ParseDsl(std::string_view content, std::string_view source_key) {
  return Parser(content, source_key).Run();
}

TypeRegistry::TypeRegistry(std::set<std::string> types,
                           std::map<std::string, std::set<std::string>> modules,
                           std::set<std::string> entities)
    : types_(types.begin(), types.end()), entities_(entities.begin(), entities.end()) {
  for (auto& [module, values] : modules) {
    modules_.emplace(module, std::set<std::string, std::less<>>(values.begin(), values.end()));
  }
}

TypeRegistry TypeRegistry::FromJson(const json& doc) {
  if (!doc.is_object()) throw SchemaError("registry must be a JSON object");
  TypeRegistry reg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "types") {
      reg.types_ = StringSet(value, "types");
    } else if (key == "entities") {
      reg.entities_ = StringSet(value, "entities");
    } else if (key == "modules") {
      if (!value.is_object()) throw SchemaError("registry field 'modules' must be an object");
      for (const auto& [module, values] : value.items()) {
        reg.modules_.emplace(module, StringSet(values, "modules"));
      }
    } else {
      throw SchemaError("unknown registry field '" + key + "'");
    }
  }
  return reg;
}

TypeRegistry TypeRegistry::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open registry file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SyntaxError(path.string() + ": " + e.what());
  }
  return FromJson(doc);
}

bool TypeRegistry::IsKnownType(std::string_view name) const {
  return types_.find(name) != types_.end();
}

bool TypeRegistry::IsKnownModule(std::string_view module) const {
  return modules_.find(module) != modules_.end();
}

bool TypeRegistry::IsKnownValue(std::string_view module, std::string_view value) const {
  auto it = modules_.find(module);
  return it != modules_.end() && it->second.find(value) != it->second.end();
}

bool TypeRegistry::IsKnownEntity(std::string_view name) const {
  return entities_.find(name) != entities_.end();
}

std::vector<Diagnostic> CheckRepo(const repofs::RepoSnapshot& snapshot,
                                  const TypeRegistry& registry) {
  ParsedRepo repo = ParseRepo(snapshot);
  return Resolve(repo, registry);
}

bool HasErrors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

std::string PropertyConstant(std::string_view member_name) {
  std::string out = "PROPERTY_";
  for (size_t i = 0; i < member_name.size(); ++i) {
    const auto c = static_cast<unsigned char>(member_name[i]);
    if (i > 0 && out.back() != '_' && c != '_') {
      const auto p = static_cast<unsigned char>(member_name[i - 1]);
      const bool boundary = (std::islower(p) && std::isupper(c)) ||
                            (std::isalpha(p) && std::isdigit(c)) ||
                            (std::isdigit(p) && std::isalpha(c));
      if (boundary) out.push_back('_');
    }
    out.push_back(static_cast<char>(std::toupper(c)));
  }
  return out;
}

repofs::FlatView GenerateStubs(const repofs::RepoSnapshot& snapshot,
                               const TypeRegistry& registry) {
  ParsedRepo repo = ParseRepo(snapshot);
  const std::vector<Diagnostic> diags = Resolve(repo, registry);
  if (HasErrors(diags)) {
    std::string msg = "generator refused input with " + std::to_string(diags.size()) +
                      " diagnostic(s):";
    for (const Diagnostic& d : diags) {
      if (d.severity != Severity::kError) continue;
      msg += "\n  " + std::string(DiagCodeName(d.code)) + " " + d.source_key + ":" +
             std::to_string(d.line) + ": " + d.message;
    }
    throw DslRejectedError(msg);
  }
  repofs::FlatView out;
  for (const EntityDecl& e : repo.entities) {
    const size_t slash = e.source_key.rfind('/');
    std::string path = "generated/";
    if (slash != std::string::npos) path += e.source_key.substr(0, slash) + "/";
    path += e.name + ".stub";
    out.emplace(std::move(path), RenderStub(e));
  }
  return out;
}

AcceptanceResult Acceptance(const repofs::RepoSnapshot& snapshot,
                            const TypeRegistry& registry) {
  AcceptanceResult result;
  result.diagnostics = CheckRepo(snapshot, registry);
  if (HasErrors(result.diagnostics)) return result;
  try {
    result.artifacts = GenerateStubs(snapshot, registry);
    result.passed = true;
  } catch (const DslRejectedError&) {
    result.passed = false;
  }
  return result;
}

}  // namespace repodsl::dsl
