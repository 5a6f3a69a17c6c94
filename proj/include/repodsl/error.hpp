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

#include <stdexcept>
#include <string>
#include <string_view>

namespace repodsl {

// Error categories shared by every module. The numeric values are mirrored
// by the C API status codes in repodsl.h and must stay in sync.
enum class ErrorCode {
  kValidation = 1,
  kIo = 2,
  kEncoding = 3,
  kSyntax = 4,
  kSchema = 5,
  kRefused = 6,
  kAlignment = 7,
  kUsage = 8,
  kTransport = 9,
  kEndpoint = 10,
  kReplay = 11,
  kDslRejected = 12,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define REPODSL_DEFINE_ERROR(Name, Code)                                \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& message) : Error(Code, message) {} \
  }

REPODSL_DEFINE_ERROR(ValidationError, ErrorCode::kValidation);
REPODSL_DEFINE_ERROR(IoError, ErrorCode::kIo);
REPODSL_DEFINE_ERROR(EncodingError, ErrorCode::kEncoding);
REPODSL_DEFINE_ERROR(SyntaxError, ErrorCode::kSyntax);
REPODSL_DEFINE_ERROR(SchemaError, ErrorCode::kSchema);
REPODSL_DEFINE_ERROR(RefusalError, ErrorCode::kRefused);
REPODSL_DEFINE_ERROR(AlignmentError, ErrorCode::kAlignment);
REPODSL_DEFINE_ERROR(UsageError, ErrorCode::kUsage);
REPODSL_DEFINE_ERROR(TransportError, ErrorCode::kTransport);
REPODSL_DEFINE_ERROR(EndpointError, ErrorCode::kEndpoint);
REPODSL_DEFINE_ERROR(ReplayError, ErrorCode::kReplay);
REPODSL_DEFINE_ERROR(DslRejectedError, ErrorCode::kDslRejected);

#undef REPODSL_DEFINE_ERROR

}  // namespace repodsl
