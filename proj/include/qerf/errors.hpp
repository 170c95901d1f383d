#ifndef QERF_ERRORS_HPP
#define QERF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qerf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define QERF_DEFINE_ERROR(Name)            \
    struct Name : Error {                  \
        using Error::Error;                \
    }

// dataset
QERF_DEFINE_ERROR(MissingColumn);
QERF_DEFINE_ERROR(EmptyDataset);
QERF_DEFINE_ERROR(EmptyAfterTrim);

struct ParseFailure : Error {
    ParseFailure(std::size_t row, const std::string& col)
        : Error("parse failure at row " + std::to_string(row) + ", column '" + col + "'"),
          row(row),
          column(col) {}
    std::size_t row;
    std::string column;
};

// gps
QERF_DEFINE_ERROR(RankDeficientDesign);
QERF_DEFINE_ERROR(DegenerateResidual);
QERF_DEFINE_ERROR(DegenerateSample);
QERF_DEFINE_ERROR(DimensionMismatch);

// matching
QERF_DEFINE_ERROR(CaliperTooLarge);
QERF_DEFINE_ERROR(NoCandidatesAnywhere);
QERF_DEFINE_ERROR(DegenerateExposure);

// quantile
QERF_DEFINE_ERROR(ZeroTotalWeight);
QERF_DEFINE_ERROR(EmptyWindow);
QERF_DEFINE_ERROR(AllCandidatesDegenerate);

// inference
QERF_DEFINE_ERROR(InsufficientNeighbors);
QERF_DEFINE_ERROR(DensityFloorHit);
QERF_DEFINE_ERROR(ReplicateFailure);

// simbench
QERF_DEFINE_ERROR(GpsUnderflow);

#undef QERF_DEFINE_ERROR

}  // namespace qerf

#endif  // QERF_ERRORS_HPP
