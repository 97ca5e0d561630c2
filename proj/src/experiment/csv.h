// Copyright 2026 The dpdmpc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPDMPC_SRC_EXPERIMENT_CSV_H_
#define DPDMPC_SRC_EXPERIMENT_CSV_H_

#include <filesystem>
#include <fstream>

namespace dpdmpc {

// LF line endings, 17 significant digits. Throws std::runtime_error when
// the file cannot be created.
std::ofstream OpenCsv(const std::filesystem::path& path);

}  // namespace dpdmpc

#endif  // DPDMPC_SRC_EXPERIMENT_CSV_H_
