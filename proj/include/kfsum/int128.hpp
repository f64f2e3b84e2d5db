#pragma once

#include <algorithm>
#include <string>

namespace kfsum {

using u128 = unsigned __int128;
using i128 = __int128;

inline std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

inline std::string to_string(i128 v) {
  if (v < 0) return "-" + to_string(static_cast<u128>(-(v + 1)) + 1);
  return to_string(static_cast<u128>(v));
}

}  // namespace kfsum
