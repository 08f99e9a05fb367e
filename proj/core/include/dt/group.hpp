#pragma once

#include <array>
#include <string>
#include <string_view>

namespace dt {

enum class Group { C, T1, T2 };

inline constexpr std::array<Group, 3> kGroups{Group::C, Group::T1, Group::T2};

std::string to_string(Group g);
Group group_from_string(std::string_view s);
inline std::size_t index_of(Group g) { return static_cast<std::size_t>(g); }

}  // namespace dt
