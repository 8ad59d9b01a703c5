#include "genrct/jsonio.hpp"

#include <fstream>
#include <sstream>

#include "genrct/errors.hpp"

namespace genrct {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path);
  out << content;
  require(out.good(), errc::io_error, "write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace genrct
