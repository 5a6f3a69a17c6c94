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

#include "repodsl/error.hpp"

namespace repodsl {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kEncoding: return "encoding";
    case ErrorCode::kSyntax: return "syntax";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kRefused: return "refused";
    case ErrorCode::kAlignment: return "alignment";
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kEndpoint: return "endpoint";
    case ErrorCode::kReplay: return "replay";
    case ErrorCode::kDslRejected: return "dsl_rejected";
  }
  return "unknown";
}

}  // namespace repodsl
