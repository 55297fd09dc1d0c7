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

#ifndef CORN_MANIFEST_H_
#define CORN_MANIFEST_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace corn {

enum class SourceKind { kClean, kNoise, kRir };

std::string_view ToString(SourceKind kind);
SourceKind ParseSourceKind(std::string_view name);

struct ManifestEntry {
  // Absolute, or relative to the manifest file's directory.
  std::string path;
  SourceKind kind = SourceKind::kClean;
};

// Line-delimited JSON: one {"path": ..., "kind": "clean"|"noise"|"rir"}
// object per line. Blank lines are ignored.
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::vector<ManifestEntry> OfKind(SourceKind kind) const;
  std::filesystem::path Resolve(const ManifestEntry& entry) const;
  std::size_t Count(SourceKind kind) const;
};

// Parses and validates: unknown kinds are a FormatError, unresolvable paths
// an IoError.
Manifest ReadManifest(const std::filesystem::path& path);
void WriteManifest(const std::filesystem::path& path, const Manifest& manifest);

// Splits each kind deterministically: the trailing `holdout_fraction` of
// every kind's entries (in file order, at least one when the kind has two or
// more entries) goes to the held-out manifest.
struct ManifestSplit {
  Manifest train;
  Manifest held_out;
};
ManifestSplit SplitManifest(const Manifest& manifest, double holdout_fraction);

}  // namespace corn

#endif  // CORN_MANIFEST_H_
