#include "zasyn/types.hpp"

#include <sstream>

namespace zasyn {

std::string format_symbol(const Symbol& sym, int num_actions, int num_obs) {
  if (num_obs * num_actions <= 9) {
    return std::to_string(symbol_digit(sym, num_actions));
  }
  std::ostringstream out;
  out << "z" << (sym.z + 1) << ":a" << (sym.a + 1);
  return out.str();
}

std::string format_policy_string(const PolicyString& y, int num_actions, int num_obs) {
  if (y.empty()) return "eps";
  std::ostringstream out;
  const bool digits = num_obs * num_actions <= 9;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!digits && i > 0) out << ",";
    out << format_symbol(y[i], num_actions, num_obs);
  }
  return out.str();
}

PolicyString parse_policy_string(const std::string& text, int num_actions, int num_obs) {
  PolicyString result;
  if (text.empty() || text == "eps") return result;

  if (text.find(':') == std::string::npos) {
    if (num_obs * num_actions > 9) {
      throw std::invalid_argument("digit coding needs an alphabet of at most 9 symbols");
    }
    for (char c : text) {
      if (c < '1' || c > '9') {
        throw std::invalid_argument(std::string("bad symbol digit '") + c + "'");
      }
      int index = c - '1';
      if (index >= num_obs * num_actions) {
        throw std::invalid_argument(std::string("symbol digit out of range: ") + c);
      }
      result.push_back({index / num_actions, index % num_actions});
    }
    return result;
  }

  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("expected z:a pair, got '" + part + "'");
    }
    auto strip = [](std::string v) {
      while (!v.empty() && (v.front() == ' ' || v.front() == 'z' || v.front() == 'a')) {
        v.erase(v.begin());
      }
      while (!v.empty() && v.back() == ' ') v.pop_back();
      return v;
    };
    int z = std::stoi(strip(part.substr(0, colon))) - 1;
    int a = std::stoi(strip(part.substr(colon + 1))) - 1;
    if (z < 0 || z >= num_obs || a < 0 || a >= num_actions) {
      throw std::invalid_argument("z:a pair out of range: '" + part + "'");
    }
    result.push_back({z, a});
  }
  return result;
}

}  // namespace zasyn
