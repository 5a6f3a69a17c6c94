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

#include "repodsl/repofs.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "repodsl/error.hpp"

namespace repodsl::repofs {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string JoinPath(std::string_view prefix, std::string_view segment) {
  if (prefix.empty()) return std::string(segment);
  std::string out;
  out.reserve(prefix.size() + 1 + segment.size());
  out.append(prefix).push_back('/');
  out.append(segment);
  return out;
}

std::vector<std::string> SplitKey(std::string_view key) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t slash = key.find('/', start);
    if (slash == std::string_view::npos) {
      parts.emplace_back(key.substr(start));
      break;
    }
    parts.emplace_back(key.substr(start, slash - start));
    start = slash + 1;
  }
  return parts;
}

void ValidateFolder(const Folder& folder, const std::string& prefix) {
  for (const auto& [name, node] : folder) {
    if (!IsValidSegment(name)) {
      throw ValidationError("invalid name segment '" + name + "' under '" +
                            (prefix.empty() ? std::string("/") : prefix) +
                            "'");
    }
    if (node.is_folder()) ValidateFolder(node.folder(), JoinPath(prefix, name));
  }
}

void FlattenInto(const Folder& folder, const std::string& prefix,
                 FlatView& out) {
  for (const auto& [name, node] : folder) {
    std::string path = JoinPath(prefix, name);
    if (node.is_file()) {
      out.emplace(std::move(path), node.file().content);
    } else {
      FlattenInto(node.folder(), path, out);
    }
  }
}

void CollectPaths(const Folder& folder, const std::string& prefix,
                  bool folders_only, std::vector<std::string>& out) {
  for (const auto& [name, node] : folder) {
    std::string path = JoinPath(prefix, name);
    if (node.is_folder()) {
      out.push_back(path);
      CollectPaths(node.folder(), path, folders_only, out);
    } else if (!folders_only) {
      out.push_back(std::move(path));
    }
  }
}

std::string ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read file: " + path.string());
  return data;
}

Folder LinearizeDir(const fs::path& dir) {
  Folder folder;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw IoError("cannot read directory " + dir.string() + ": " + ec.message());
  for (const fs::directory_entry& entry : it) {
    const fs::path& path = entry.path();
    std::string name = path.filename().string();
    if (!IsValidUtf8(name)) {
      throw EncodingError("file name is not UTF-8: " + path.string());
    }
    if (!IsValidSegment(name)) {
      throw ValidationError("unrepresentable file name: " + path.string());
    }
    fs::file_status status = entry.symlink_status(ec);
    if (ec) throw IoError("cannot stat " + path.string() + ": " + ec.message());
    if (fs::is_symlink(status)) {
      throw IoError("symlinks are not supported: " + path.string());
    }
    if (fs::is_directory(status)) {
      folder.emplace(std::move(name), LinearizeDir(path));
    } else if (fs::is_regular_file(status)) {
      std::string content = ReadFileBytes(path);
      if (!IsValidUtf8(content)) {
        throw EncodingError("file is not valid UTF-8 text: " + path.string());
      }
      folder.emplace(std::move(name), File{std::move(content)});
    } else {
      throw IoError("unsupported file type: " + path.string());
    }
  }
  return folder;
}

void WriteFolder(const Folder& folder, const fs::path& dir) {
  for (const auto& [name, node] : folder) {
    fs::path path = dir / fs::u8path(name);
    if (node.is_folder()) {
      std::error_code ec;
      fs::create_directory(path, ec);
      if (ec) throw IoError("cannot create directory " + path.string() + ": " + ec.message());
      WriteFolder(node.folder(), path);
    } else {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      const std::string& content = node.file().content;
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.close();
      if (!out) throw IoError("cannot write file: " + path.string());
    }
  }
}

// Builds a snapshot directly from SAX events so that duplicate keys (which a
// DOM parse would silently collapse) are visible and rejected.
class SnapshotSax : public nlohmann::json_sax<json> {
 public:
  RepoSnapshot snapshot;
  std::string schema_error;
  std::string syntax_error;

  bool null() override { return Leaf("null"); }
  bool boolean(bool) override { return Leaf("boolean"); }
  bool number_integer(number_integer_t) override { return Leaf("number"); }
  bool number_unsigned(number_unsigned_t) override { return Leaf("number"); }
  bool number_float(number_float_t, const string_t&) override {
    return Leaf("number");
  }
  bool binary(binary_t&) override { return Leaf("binary"); }

  bool string(string_t& value) override {
    if (stack_.empty()) return Fail("document root must be an object, got string");
    Node* node = Place(pending_key_, Node(File{std::move(value)}));
    return node != nullptr;
  }

  bool start_object(std::size_t) override {
    if (stack_.empty()) {
      if (started_) return Fail("multiple documents");
      started_ = true;
      stack_.push_back({&snapshot.root, "", {}});
      return true;
    }
    Node* node = Place(pending_key_, Node(Folder{}));
    if (node == nullptr) return false;
    stack_.push_back({&node->folder(), CurrentPath(pending_key_), {}});
    return true;
  }

  bool key(string_t& key) override {
    Frame& frame = stack_.back();
    if (!frame.literal_keys.insert(key).second) {
      return Fail("duplicate key '" + key + "' in '" + DisplayPath(frame.path) + "'");
    }
    pending_key_ = key;
    return true;
  }

  bool end_object() override {
    stack_.pop_back();
    return true;
  }

  bool start_array(std::size_t) override { return Leaf("array"); }
  bool end_array() override { return false; }

  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    syntax_error = "byte " + std::to_string(position) + ": " + ex.what();
    return false;
  }

 private:
  struct Frame {
    Folder* folder;
    std::string path;
    std::set<std::string> literal_keys;
  };

  static std::string DisplayPath(const std::string& path) {
    return path.empty() ? std::string("/") : path;
  }

  std::string CurrentPath(const std::string& key) const {
    return JoinPath(stack_.back().path, key);
  }

  bool Fail(std::string message) {
    if (schema_error.empty()) schema_error = std::move(message);
    return false;
  }

  bool Leaf(const char* kind) {
    if (stack_.empty()) {
      return Fail(std::string("document root must be an object, got ") + kind);
    }
    return Fail(std::string(kind) + " value at '" + CurrentPath(pending_key_) +
                "' (only objects and strings are allowed)");
  }

  // Inserts `node` at `key` relative to the current folder. Keys containing
  // '/' create or reuse intermediate folders.
  Node* Place(const std::string& key, Node node) {
    Folder* folder = stack_.back().folder;
    std::vector<std::string> parts = SplitKey(key);
    std::string path = stack_.back().path;
    for (size_t i = 0; i < parts.size(); ++i) {
      const std::string& part = parts[i];
      path = JoinPath(path, part);
      if (!IsValidSegment(part)) {
        Fail("invalid name segment in key '" + key + "'");
        return nullptr;
      }
      auto it = folder->find(part);
      bool last = i + 1 == parts.size();
      if (!last) {
        if (it == folder->end()) {
          it = folder->emplace(part, Node(Folder{})).first;
        } else if (!it->second.is_folder()) {
          Fail("'" + path + "' is both a file and a folder");
          return nullptr;
        }
        folder = &it->second.folder();
        continue;
      }
      if (it != folder->end()) {
        if (it->second.is_folder() && node.is_folder()) return &it->second;
        Fail("'" + path + "' is defined twice");
        return nullptr;
      }
      return &folder->emplace(part, std::move(node)).first->second;
    }
    return nullptr;
  }

  std::vector<Frame> stack_;
  std::string pending_key_;
  bool started_ = false;
};

Folder FolderFromJson(const json& value, const std::string& prefix) {
  Folder folder;
  for (const auto& [key, child] : value.items()) {
    std::vector<std::string> parts = SplitKey(key);
    Folder* target = &folder;
    std::string path = prefix;
    for (size_t i = 0; i < parts.size(); ++i) {
      const std::string& part = parts[i];
      path = JoinPath(path, part);
      if (!IsValidSegment(part)) {
        throw SchemaError("invalid name segment in key '" + key + "'");
      }
      auto it = target->find(part);
      if (i + 1 < parts.size()) {
        if (it == target->end()) {
          it = target->emplace(part, Node(Folder{})).first;
        } else if (!it->second.is_folder()) {
          throw SchemaError("'" + path + "' is both a file and a folder");
        }
        target = &it->second.folder();
        continue;
      }
      if (child.is_string()) {
        if (it != target->end()) throw SchemaError("'" + path + "' is defined twice");
        target->emplace(part, File{child.get<std::string>()});
      } else if (child.is_object()) {
        Folder sub = FolderFromJson(child, path);
        if (it == target->end()) {
          target->emplace(part, std::move(sub));
        } else if (it->second.is_folder()) {
          for (auto& [n, c] : sub) {
            if (!it->second.folder().emplace(n, std::move(c)).second) {
              throw SchemaError("'" + JoinPath(path, n) + "' is defined twice");
            }
          }
        } else {
          throw SchemaError("'" + path + "' is both a file and a folder");
        }
      } else {
        throw SchemaError(std::string(child.type_name()) + " value at '" + path +
                          "' (only objects and strings are allowed)");
      }
    }
  }
  return folder;
}

json FolderToJson(const Folder& folder) {
  json out = json::object();
  for (const auto& [name, node] : folder) {
    if (node.is_file()) {
      out[name] = node.file().content;
    } else {
      out[name] = FolderToJson(node.folder());
    }
  }
  return out;
}

}  // namespace

bool IsValidSegment(std::string_view segment) {
  if (segment.empty() || segment == "." || segment == "..") return false;
  return segment.find_first_of(std::string_view("/\\\0", 3)) ==
         std::string_view::npos;
}

void ValidateSnapshot(const RepoSnapshot& snapshot) {
  ValidateFolder(snapshot.root, "");
}

bool IsValidUtf8(std::string_view text) {
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      ++i;
      continue;
    }
    size_t len;
    unsigned min_cp;
    unsigned cp;
    if ((c & 0xE0) == 0xC0) {
      len = 2; min_cp = 0x80; cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3; min_cp = 0x800; cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4; min_cp = 0x10000; cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

RepoSnapshot Linearize(const fs::path& root_directory) {
  std::error_code ec;
  fs::file_status status = fs::status(root_directory, ec);
  if (ec || !fs::exists(status)) {
    throw IoError("no such directory: " + root_directory.string());
  }
  if (!fs::is_directory(status)) {
    throw IoError("not a directory: " + root_directory.string());
  }
  return RepoSnapshot{LinearizeDir(root_directory)};
}

void Delinearize(const RepoSnapshot& snapshot, const fs::path& dest) {
  ValidateSnapshot(snapshot);
  std::error_code ec;
  fs::file_status status = fs::symlink_status(dest, ec);
  if (fs::exists(status)) {
    if (!fs::is_directory(status)) {
      throw RefusalError("destination exists and is not a directory: " + dest.string());
    }
    if (!fs::is_empty(dest, ec) || ec) {
      throw RefusalError("destination directory is not empty: " + dest.string());
    }
  } else {
    fs::create_directories(dest, ec);
    if (ec) throw IoError("cannot create " + dest.string() + ": " + ec.message());
  }
  WriteFolder(snapshot.root, dest);
}

FlatView Flatten(const RepoSnapshot& snapshot) {
  FlatView flat;
  FlattenInto(snapshot.root, "", flat);
  return flat;
}

RepoSnapshot Unflatten(const FlatView& flat) {
  RepoSnapshot snapshot;
  for (const auto& [key, content] : flat) {
    std::vector<std::string> parts = SplitKey(key);
    Folder* folder = &snapshot.root;
    for (size_t i = 0; i < parts.size(); ++i) {
      if (!IsValidSegment(parts[i])) {
        throw ValidationError("invalid path key '" + key + "'");
      }
      auto it = folder->find(parts[i]);
      if (i + 1 == parts.size()) {
        if (it != folder->end()) {
          throw ValidationError("path '" + key + "' is both a file and a folder");
        }
        folder->emplace(parts[i], File{content});
      } else {
        if (it == folder->end()) {
          it = folder->emplace(parts[i], Node(Folder{})).first;
        } else if (!it->second.is_folder()) {
          throw ValidationError("path '" + key + "' passes through a file");
        }
        folder = &it->second.folder();
      }
    }
  }
  return snapshot;
}

RepoSnapshot ParseSnapshot(std::string_view raw) {
  SnapshotSax sax;
  bool ok = json::sax_parse(raw.begin(), raw.end(), &sax);
  if (ok) return std::move(sax.snapshot);
  if (!sax.schema_error.empty()) throw SchemaError(sax.schema_error);
  throw SyntaxError(sax.syntax_error.empty() ? "malformed document" : sax.syntax_error);
}

RepoSnapshot SnapshotFromJson(const json& value) {
  if (!value.is_object()) {
    throw SchemaError(std::string("document root must be an object, got ") +
                      value.type_name());
  }
  return RepoSnapshot{FolderFromJson(value, "")};
}

json SnapshotToJson(const RepoSnapshot& snapshot) {
  return FolderToJson(snapshot.root);
}

std::string CanonicalSerialize(const RepoSnapshot& snapshot) {
  try {
    return SnapshotToJson(snapshot).dump();
  } catch (const json::type_error& e) {
    throw EncodingError(std::string("snapshot holds non-UTF-8 text: ") + e.what());
  }
}

std::string FlatRecords(const FlatView& flat) {
  std::string out;
  for (const auto& [path, content] : flat) {
    json record = {{"path", path}, {"content", content}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<std::string> AllPaths(const RepoSnapshot& snapshot) {
  std::vector<std::string> out;
  CollectPaths(snapshot.root, "", false, out);
  return out;
}

std::vector<std::string> FolderPaths(const RepoSnapshot& snapshot) {
  std::vector<std::string> out;
  CollectPaths(snapshot.root, "", true, out);
  return out;
}

std::vector<std::string> SplitLines(std::string_view content) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < content.size()) {
    size_t nl = content.find('\n', start);
    size_t end = nl == std::string_view::npos ? content.size() : nl;
    std::string_view line = content.substr(start, end - start);
    if (nl != std::string_view::npos && !line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    lines.emplace_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

}  // namespace repodsl::repofs
