#pragma once

#include <optional>
#include <string>

#include "diracspec/direct_spectra.hpp"
#include "diracspec/potential.hpp"

namespace dirac {

// File formats. Malformed input raises Error("io", "SchemaViolation") with the
// offending line or field in the message.
//
// potential JSON:
//   {"type":"piecewise","breakpoints":[...],"q1":[...],"q2":[...],"p":2}
//   {"type":"sampled","nodes":[...],"q1":[...],"q2":[...]}
// A "Q" array of 2x2 matrices may replace q1/q2; it must be symmetric and
// trace-free. potential CSV: rows x,q1,q2 (sampled), optional header.
// spectra JSON: {"p":2,"n_min":-64,"n_max":64,"lambda":[...],"mu":[...]}
// norming JSON: the same with "alpha"; "mu" is optional.

Potential parse_potential_json(const std::string& text);
Potential parse_potential_csv(const std::string& text);
// Chooses CSV for a .csv extension, JSON otherwise.
Potential load_potential(const std::string& path);
std::string potential_to_json(const Potential& q);

struct SpectraFile {
  double p = 2.0;
  IndexedSeq lambda;
  std::optional<IndexedSeq> mu;
  std::optional<IndexedSeq> alpha;

  SpectrumPair pair() const;      // SchemaViolation without mu
  NormingData norming() const;    // SchemaViolation without alpha
};

SpectraFile parse_spectra_json(const std::string& text);
SpectraFile load_spectra(const std::string& path);
std::string spectra_to_json(const SpectraFile& f);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dirac
