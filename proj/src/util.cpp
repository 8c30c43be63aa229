#include "semred/util.hpp"

#include <fstream>
#include <sstream>

#include "semred/errors.hpp"

namespace semred {

std::string to_hex(uint64_t value)
{
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write file '" + path + "'");
  }
  out << contents;
}

}  // namespace semred
