#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace oops::plot {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws DataError when absent.
  std::size_t column(const std::string& name) const;
  // Parsed numeric column; empty cells become NaN.
  std::vector<double> numbers(const std::string& name) const;
};

// Throws DataError on a missing file, ragged rows or an empty body.
CsvTable read_csv(const std::filesystem::path& path);

// Renders every input into `out_dir`: metrics files become one learning-curve
// SVG (mean and +-1 std band across files when there are several),
// calibration files a scatter, sweep files a line over lambda. Returns the
// written paths.
std::vector<std::filesystem::path> plot_files(const std::vector<std::filesystem::path>& inputs,
                                              const std::filesystem::path& out_dir);

}  // namespace oops::plot
