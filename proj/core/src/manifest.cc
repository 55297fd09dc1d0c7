// Copyright 2026 The CORN Authors
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

#include "corn/manifest.h"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "corn/error.h"

namespace corn {

std::string_view ToString(SourceKind kind) {
  switch (kind) {
    case SourceKind::kClean:
      return "clean";
    case SourceKind::kNoise:
      return "noise";
    case SourceKind::kRir:
      return "rir";
  }
  return "clean";
}

SourceKind ParseSourceKind(std::string_view name) {
  if (name == "clean") return SourceKind::kClean;
  if (name == "noise") return SourceKind::kNoise;
  if (name == "rir") return SourceKind::kRir;
  throw FormatError("unknown manifest kind '" + std::string(name) + "'");
}

std::vector<ManifestEntry> Manifest::OfKind(SourceKind kind) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries) {
    if (e.kind == kind) out.push_back(e);
  }
  return out;
}

std::size_t Manifest::Count(SourceKind kind) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.kind == kind;
  return n;
}

std::filesystem::path Manifest::Resolve(const ManifestEntry& entry) const {
  std::filesystem::path p(entry.path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

Manifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  Manifest manifest;
  manifest.base_dir = path.parent_path();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!record.is_object() || !record.contains("path") || !record.contains("kind") ||
        !record["path"].is_string() || !record["kind"].is_string()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected {\"path\": string, \"kind\": string}");
    }
    ManifestEntry entry;
    entry.path = record["path"].get<std::string>();
    entry.kind = ParseSourceKind(record["kind"].get<std::string>());
    if (!std::filesystem::exists(manifest.Resolve(entry))) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": unresolvable path " + manifest.Resolve(entry).string());
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void WriteManifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  for (const auto& e : manifest.entries) {
    nlohmann::json record = {{"path", e.path}, {"kind", std::string(ToString(e.kind))}};
    out << record.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

ManifestSplit SplitManifest(const Manifest& manifest, double holdout_fraction) {
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
    throw ContractError("holdout_fraction must lie in [0, 1)");
  }
  ManifestSplit split;
  split.train.base_dir = manifest.base_dir;
  split.held_out.base_dir = manifest.base_dir;
  for (SourceKind kind : {SourceKind::kClean, SourceKind::kNoise, SourceKind::kRir}) {
    auto entries = manifest.OfKind(kind);
    std::size_t n = entries.size();
    std::size_t n_held = static_cast<std::size_t>(std::llround(holdout_fraction * n));
    if (holdout_fraction > 0.0 && n >= 2 && n_held == 0) n_held = 1;
    if (n_held >= n && n > 0) n_held = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      (i + n_held < n ? split.train : split.held_out).entries.push_back(entries[i]);
    }
  }
  return split;
}

}  // namespace corn
