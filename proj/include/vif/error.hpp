/*
 * Copyright 2026 The VIF Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace vif {

// Numeric values are shared with vif_status in vif.h.
enum class ErrorCode : int {
    InvalidArgument = 1,
    Parse = 2,
    Io = 3,
    Domain = 4,
    Incomparable = 5,
    Infeasible = 6,
    Overflow = 7,
    Auth = 8,
    Internal = 99,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorCode::Parse, what) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};
struct IncomparableError : Error {
    explicit IncomparableError(const std::string& what) : Error(ErrorCode::Incomparable, what) {}
};
struct InfeasibleError : Error {
    explicit InfeasibleError(const std::string& what) : Error(ErrorCode::Infeasible, what) {}
};

}  // namespace vif
