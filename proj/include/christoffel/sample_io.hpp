#pragma once

#include <iosfwd>
#include <string>

#include "christoffel/measures.hpp"

namespace christoffel {

// CSV sample format: one row per point, d numeric columns, optional
// header row, optional final `weight` column (recognized by header name).
// Non-finite values are rejected.
SampleCloud read_samples_csv(std::istream& in);
SampleCloud read_samples_csv_file(const std::string& path);
void write_samples_csv(const SampleCloud& cloud, std::ostream& out);
void write_samples_csv_file(const SampleCloud& cloud, const std::string& path);

// Analytic measure config, a JSON object {"kind": "...", "params": {...}}:
//   {"kind":"chebyshev-1d"}
//   {"kind":"lebesgue-box","params":{"bounds":[[a1,b1],...],"mass":m?}}
//   {"kind":"product","params":{"factors":[<config>,...]}}
//   {"kind":"empirical","params":{"csv":"path"}}
MomentProviderPtr parse_measure_config(const std::string& json_text);

// Resolves a CLI measure argument: inline JSON (starts with '{'), a
// .json config file, or a CSV sample file (anything else).
MomentProviderPtr load_measure(const std::string& spec);

}  // namespace christoffel
