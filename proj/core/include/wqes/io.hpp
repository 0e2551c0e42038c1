#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "wqes/mcs.hpp"
#include "wqes/returns.hpp"

namespace wqes {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads a two-column CSV `date,return` (header required, returns in percent,
// LF or CRLF). Dates must be strictly ascending; a non-numeric return or an
// out-of-order row raises a ParseError naming the offending line.
ReturnSeries load_returns(const std::filesystem::path& path);

// All emitted numbers carry 10 significant digits.
std::string format_number(double x);

// The exact double a serialized number parses back to; applied at emission
// boundaries so files and in-memory matrices agree bit for bit.
double round_sig(double x);

struct ForecastSeries {
  std::vector<std::string> dates;
  std::vector<double> var;
  std::vector<double> es;
};

// Per-model forecast CSV: `date,var,es`.
void write_forecast_csv(const std::filesystem::path& path, const ForecastSeries& fc);
ForecastSeries load_forecast_csv(const std::filesystem::path& path);

// Per-step loss matrix CSV: `date,<model...>`, one row per step.
void write_loss_csv(const std::filesystem::path& path, const LossMatrix& losses);
LossMatrix load_loss_csv(const std::filesystem::path& path);

// Plain table writer: header row and pre-formatted cells.
void write_table_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

}  // namespace wqes
