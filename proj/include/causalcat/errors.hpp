#pragma once

#include <stdexcept>
#include <string>

namespace causalcat {

// Base class for every error raised by the library. The CLI maps these to
// exit code 2 (usage / parse errors).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CAUSALCAT_DEFINE_ERROR(Name)       \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// dag-core
CAUSALCAT_DEFINE_ERROR(CycleError);
CAUSALCAT_DEFINE_ERROR(DuplicateEdge);
CAUSALCAT_DEFINE_ERROR(DuplicateVertex);
CAUSALCAT_DEFINE_ERROR(UnknownVertex);
CAUSALCAT_DEFINE_ERROR(InvalidVertexName);
CAUSALCAT_DEFINE_ERROR(TooManyVertices);
CAUSALCAT_DEFINE_ERROR(OverlapError);
CAUSALCAT_DEFINE_ERROR(NotSingular);

// diagram
CAUSALCAT_DEFINE_ERROR(BoundaryMismatch);
CAUSALCAT_DEFINE_ERROR(PatternMismatch);
CAUSALCAT_DEFINE_ERROR(NotBuildable);
CAUSALCAT_DEFINE_ERROR(MalformedDiagram);

// effects
CAUSALCAT_DEFINE_ERROR(NotSubWord);
CAUSALCAT_DEFINE_ERROR(NotDisjoint);

// semantics / docalc
CAUSALCAT_DEFINE_ERROR(DimensionMismatch);
CAUSALCAT_DEFINE_ERROR(BadState);
CAUSALCAT_DEFINE_ERROR(BadModel);
CAUSALCAT_DEFINE_ERROR(ZeroConditional);

// io
CAUSALCAT_DEFINE_ERROR(ParseError);

#undef CAUSALCAT_DEFINE_ERROR

}  // namespace causalcat
