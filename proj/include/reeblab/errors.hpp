#pragma once

#include <stdexcept>
#include <string>

namespace reeblab {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define REEBLAB_ERROR(Name)                                        \
    struct Name : Error {                                          \
        explicit Name(const std::string& what) : Error(what) {}    \
    }

REEBLAB_ERROR(DegenerateContact);
REEBLAB_ERROR(NonOrientedDensity);
REEBLAB_ERROR(EmptyOrbitSet);
REEBLAB_ERROR(StepFailure);
REEBLAB_ERROR(NoReturn);
REEBLAB_ERROR(ChartEscape);
REEBLAB_ERROR(OutOfChart);
REEBLAB_ERROR(NotNormalized);
REEBLAB_ERROR(AlignmentFailure);
REEBLAB_ERROR(OutOfDomain);
REEBLAB_ERROR(NegativeRadicand);
REEBLAB_ERROR(DivisionAtBinding);
REEBLAB_ERROR(NonMonotone);
REEBLAB_ERROR(NonVanishingBoundary);
REEBLAB_ERROR(DomainOverflow);
REEBLAB_ERROR(WitnessNotFound);
REEBLAB_ERROR(ConfigError);
REEBLAB_ERROR(IoError);

#undef REEBLAB_ERROR

} // namespace reeblab
