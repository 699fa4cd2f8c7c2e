// Copyright 2026 The z2frob Authors
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

#ifndef Z2FROB_ERRORS_HPP
#define Z2FROB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace z2frob {

/// Base class of every error raised by the library. `kind()` is the stable
/// identifier used in machine-readable reports.
class Error : public std::runtime_error {
   public:
    Error(std::string kind, const std::string& what) : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

   private:
    std::string kind_;
};

#define Z2FROB_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                            \
       public:                                                             \
        explicit Name(const std::string& what) : Error(#Name, what) {}     \
    };

Z2FROB_DEFINE_ERROR(DimensionError)
Z2FROB_DEFINE_ERROR(ChartError)
Z2FROB_DEFINE_ERROR(UnknownCoordinate)
Z2FROB_DEFINE_ERROR(HomogeneityError)
Z2FROB_DEFINE_ERROR(CenteringError)
Z2FROB_DEFINE_ERROR(OddIntegrationError)
Z2FROB_DEFINE_ERROR(NotInvertibleModJ)
Z2FROB_DEFINE_ERROR(DependentAtPoint)
Z2FROB_DEFINE_ERROR(JacobianSingular)
Z2FROB_DEFINE_ERROR(DegenerateAtPoint)
Z2FROB_DEFINE_ERROR(NonzeroDegree)
Z2FROB_DEFINE_ERROR(OddSquareNonzero)
Z2FROB_DEFINE_ERROR(NotCommuting)
Z2FROB_DEFINE_ERROR(NotInvolutive)
Z2FROB_DEFINE_ERROR(InternalInconsistency)
Z2FROB_DEFINE_ERROR(ParseError)

#undef Z2FROB_DEFINE_ERROR

}  // namespace z2frob

#endif  // Z2FROB_ERRORS_HPP
