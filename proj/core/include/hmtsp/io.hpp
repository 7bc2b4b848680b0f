#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "hmtsp/instance.hpp"

namespace hmtsp {

enum class FormatErrorKind {
  kUnreadable,
  kMalformedHeader,
  kCountMismatch,
  kNonFinite,
  kMalformedLine,
  kIndexOutOfRange,
  kProbabilityOutOfRange,
  kConflictingDuplicate,
  kNotAPermutation,
};

std::string_view to_string(FormatErrorKind kind);

class FormatError : public InstanceError {
public:
  FormatError(FormatErrorKind kind, const std::string& what)
      : InstanceError(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  FormatErrorKind kind() const { return kind_; }

private:
  FormatErrorKind kind_;
};

// Instance files: either "n <count>" followed by <count> lines "<x> <y>", or a
// TSPLIB EUC_2D subset (NAME / DIMENSION / NODE_COORD_SECTION / EOF).
// Coordinates outside [0,1] are normalized into the unit square on load.
Instance parse_instance(std::istream& in);
Instance read_instance(const std::filesystem::path& path);
void write_instance(std::ostream& out, const Instance& inst);
void write_instance(const std::filesystem::path& path, const Instance& inst);

struct TourFile {
  Tour tour;
  double length = 0.0;
};

TourFile parse_tour(std::istream& in);
TourFile read_tour(const std::filesystem::path& path);
void write_tour(std::ostream& out, std::span<const Vertex> tour, double length);
void write_tour(const std::filesystem::path& path, std::span<const Vertex> tour, double length);

}  // namespace hmtsp
