#pragma once

#include <stdexcept>
#include <string>

namespace veech {

// Root of every error thrown by the library. Callers that only need to know
// "something in veech failed" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define VEECH_DEFINE_ERROR(Name)                                                                   \
    class Name : public Error {                                                                    \
    public:                                                                                        \
        using Error::Error;                                                                        \
    }

VEECH_DEFINE_ERROR(InvalidLevel);
VEECH_DEFINE_ERROR(InvalidIndex);
VEECH_DEFINE_ERROR(InvalidPair);
VEECH_DEFINE_ERROR(ContractViolation);
VEECH_DEFINE_ERROR(NumericConsistencyError);
VEECH_DEFINE_ERROR(PoleError);
VEECH_DEFINE_ERROR(OutOfChartError);
VEECH_DEFINE_ERROR(InvalidPole);
VEECH_DEFINE_ERROR(PathError);
VEECH_DEFINE_ERROR(StiffnessError);
VEECH_DEFINE_ERROR(DivergenceError);
VEECH_DEFINE_ERROR(SpectralRadiusError);
VEECH_DEFINE_ERROR(BranchError);
VEECH_DEFINE_ERROR(SingularError);
VEECH_DEFINE_ERROR(SeriesRadiusError);
VEECH_DEFINE_ERROR(ParseError);
VEECH_DEFINE_ERROR(InvalidArgument);

#undef VEECH_DEFINE_ERROR

} // namespace veech
