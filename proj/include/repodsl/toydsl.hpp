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

#pragma once

// A small entity language standing in for the production DSL, with a
// cross-file checker and a stub generator used as the toolchain-acceptance
// signal.
//
//   file   ::= entity*
//   entity ::= "entity" ["abstract"] Name ["extends" Name] "{" member* "}"
//   member ::= name ":" TypeName
//            | name "=" Module "::" value
//
// "//" starts a comment that runs to the end of the line.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "repodsl/repofs.hpp"

namespace repodsl::dsl {

enum class Layer { kServer, kUi, kTimeslices };

std::string_view LayerName(Layer layer);

// First path segment naming a layer ("server", "ui", "timeslices"; the
// spellings "time-slices" and "time_slices" are accepted too).
std::optional<Layer> LayerOf(std::string_view source_key);

struct TypedMember {
  std::string type_name;
};

struct AssignedMember {
  std::string module;
  std::string value;
};

struct Member {
  std::string name;
  std::variant<TypedMember, AssignedMember> decl;
  int line = 0;

  bool is_typed() const { return std::holds_alternative<TypedMember>(decl); }
};

struct EntityDecl {
  std::string name;
  bool is_abstract = false;
  std::optional<std::string> parent;
  std::vector<Member> members;
  std::string source_key;
  std::optional<Layer> layer;
  int line = 0;
};

enum class Severity { kError, kWarning };
enum class DiagCode {
  kSyntax,
  kUnknownType,
  kUnknownParent,
  kDuplicate,
  kLayerRule,
  kDanglingRef,
};

std::string_view SeverityName(Severity s);
std::string_view DiagCodeName(DiagCode c);

struct Diagnostic {
  Severity severity = Severity::kError;
  DiagCode code = DiagCode::kSyntax;
  std::string source_key;
  int line = 0;  // 1-based
  std::string message;

  nlohmann::json ToJson() const;
};

struct ParseResult {
  std::vector<EntityDecl> entities;
  std::vector<Diagnostic> diagnostics;
};

// Total: never throws on any input. After a syntax error parsing resumes at
// the next "entity" keyword.
ParseResult ParseDsl(std::string_view content, std::string_view source_key);

// What the generator knows besides the entities declared in the project.
class TypeRegistry {
 public:
  TypeRegistry() = default;
  TypeRegistry(std::set<std::string> types,
               std::map<std::string, std::set<std::string>> modules,
               std::set<std::string> entities);

  // {"types": [...], "modules": {"Module": ["value", ...]}, "entities": [...]}
  // Throws SchemaError on the wrong shape.
  static TypeRegistry FromJson(const nlohmann::json& doc);
  // Throws IoError, SyntaxError or SchemaError.
  static TypeRegistry Load(const std::filesystem::path& path);

  bool IsKnownType(std::string_view name) const;
  bool IsKnownModule(std::string_view module) const;
  bool IsKnownValue(std::string_view module, std::string_view value) const;
  bool IsKnownEntity(std::string_view name) const;

  const std::set<std::string, std::less<>>& types() const { return types_; }

 private:
  std::set<std::string, std::less<>> types_;
  std::map<std::string, std::set<std::string, std::less<>>, std::less<>> modules_;
  std::set<std::string, std::less<>> entities_;
};

// Parses every *.dsl file and resolves names across files. Diagnostics are
// ordered by source key, then line.
std::vector<Diagnostic> CheckRepo(const repofs::RepoSnapshot& snapshot,
                                  const TypeRegistry& registry);

bool HasErrors(const std::vector<Diagnostic>& diagnostics);

// "attribute1" -> "PROPERTY_ATTRIBUTE_1", "productType" -> "PROPERTY_PRODUCT_TYPE".
std::string PropertyConstant(std::string_view member_name);

// One stub per entity at generated/<source folder>/<Entity>.stub. Throws
// DslRejectedError listing the errors when CheckRepo reports any.
repofs::FlatView GenerateStubs(const repofs::RepoSnapshot& snapshot,
                               const TypeRegistry& registry);

struct AcceptanceResult {
  bool passed = false;
  std::vector<Diagnostic> diagnostics;
  repofs::FlatView artifacts;
};

AcceptanceResult Acceptance(const repofs::RepoSnapshot& snapshot,
                            const TypeRegistry& registry);

}  // namespace repodsl::dsl
