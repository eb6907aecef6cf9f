#pragma once

#include <stdexcept>
#include <string>

namespace forcing_lab {

// Base of every error raised by the library. Outcomes that are part of an
// operation's contract (NotFound, Unknown, Violation) are returned as values.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define FORCING_LAB_ERROR(Name)                                  \
  class Name : public Error {                                    \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

FORCING_LAB_ERROR(PreconditionError);
FORCING_LAB_ERROR(InvalidCondition);
FORCING_LAB_ERROR(NotAligned);
FORCING_LAB_ERROR(MultiValuedPhi);
FORCING_LAB_ERROR(LinkImpossible);
FORCING_LAB_ERROR(DuplicateReal);
FORCING_LAB_ERROR(ResourceBound);
FORCING_LAB_ERROR(NodeMismatch);
FORCING_LAB_ERROR(RootMismatch);
FORCING_LAB_ERROR(CellMismatch);
FORCING_LAB_ERROR(ClassifierViolation);
FORCING_LAB_ERROR(EqualBranches);
FORCING_LAB_ERROR(SubtractUnderflow);
FORCING_LAB_ERROR(OverlappingRanges);
FORCING_LAB_ERROR(NotIndecomposable);
FORCING_LAB_ERROR(BadParams);
FORCING_LAB_ERROR(UnknownSuite);
FORCING_LAB_ERROR(ParseError);

#undef FORCING_LAB_ERROR

}  // namespace forcing_lab
