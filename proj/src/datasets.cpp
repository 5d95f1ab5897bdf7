#include "cssdpp/datasets.hpp"

#include "cssdpp/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cssdpp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    std::ostringstream msg;
    msg << "line " << line << ": cannot parse '" << field << "' as a number";
    throw InputError(msg.str());
  }
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "line " << line << ": non-finite value";
    throw InputError(msg.str());
  }
  return value;
}

Vector repeat(std::initializer_list<double> head, double tail_value, Index tail_count) {
  Vector out(static_cast<Index>(head.size()) + tail_count);
  Index i = 0;
  for (double v : head) {
    out(i++) = v;
  }
  for (; i < out.size(); ++i) {
    out(i) = tail_value;
  }
  return out;
}

}  // namespace

Matrix read_csv(std::istream& in, bool skip_header) {
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    if (skip_header) {
      skip_header = false;
      continue;
    }
    Index width = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_double(rest.substr(0, comma), line_no));
      ++width;
      if (comma == std::string_view::npos) {
        break;
      }
      rest.remove_prefix(comma + 1);
    }
    if (cols >= 0 && width != cols) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << cols << " fields, found " << width;
      throw InputError(msg.str());
    }
    cols = width;
    ++rows;
  }
  if (rows == 0) {
    throw InputError("CSV input has no data rows");
  }
  Matrix X(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      X(i, j) = values[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return X;
}

Matrix read_csv_file(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open '" + path + "'");
  }
  return read_csv(in, skip_header);
}

void write_csv(std::ostream& out, const Matrix& X) {
  out << std::setprecision(17);
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < X.cols(); ++j) {
      if (j > 0) {
        out << ',';
      }
      out << X(i, j);
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const Matrix& X) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write '" + path + "'");
  }
  write_csv(out, X);
}

Matrix standardize_columns(const Matrix& X) {
  Matrix out = X.rowwise() - X.colwise().mean();
  if (X.rows() < 2) {
    return out;
  }
  for (Index j = 0; j < out.cols(); ++j) {
    const double sd = std::sqrt(out.col(j).squaredNorm() / static_cast<double>(X.rows() - 1));
    if (sd > 0.0) {
      out.col(j) /= sd;
    }
  }
  return out;
}

ToySpectrum toy_spectrum(std::string_view name) {
  if (name == "proj-3") {
    return {"proj-3", repeat({100, 100, 100}, 0.1, 17), 3};
  }
  if (name == "proj-5") {
    return {"proj-5", repeat({100, 100, 100, 100, 100}, 0.1, 15), 5};
  }
  if (name == "smooth-3") {
    return {"smooth-3", repeat({100, 10, 1}, 0.1, 17), 3};
  }
  if (name == "smooth-5") {
    return {"smooth-5", repeat({10000, 1000, 100, 10, 1}, 0.1, 15), 5};
  }
  if (name == "identity-20") {
    return {"identity-20", Vector::Ones(20), 0};
  }
  if (name.starts_with("diag:")) {
    std::vector<double> values;
    std::string_view rest = name.substr(5);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      values.push_back(parse_double(rest.substr(0, comma), 1));
      if (comma == std::string_view::npos) {
        break;
      }
      rest.remove_prefix(comma + 1);
    }
    if (values.empty()) {
      throw InputError("diag: spectrum needs at least one value");
    }
    Vector sigma = Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
    if ((sigma.array() < 0.0).any()) {
      throw InputError("singular values must be nonnegative");
    }
    std::sort(sigma.data(), sigma.data() + sigma.size(), std::greater<>());
    return {std::string(name), sigma, 0};
  }
  throw InputError("unknown toy spectrum '" + std::string(name) + "'");
}

std::vector<std::string> toy_names() {
  return {"proj-3", "proj-5", "smooth-3", "smooth-5", "identity-20"};
}

}  // namespace cssdpp
