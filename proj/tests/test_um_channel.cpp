#include <doctest.h>

#include <set>
#include <string>

#include "hcn/um_channel.hpp"
#include "oracles.hpp"

using namespace hcn;
using namespace hcn::oracle;

TEST_CASE("group_of follows the GSM taxonomy") {
  CHECK(group_of(LogicalChannel::FCCH) == ChannelGroup::BCH);
  CHECK(group_of(LogicalChannel::SCH) == ChannelGroup::BCH);
  CHECK(group_of(LogicalChannel::BCCH) == ChannelGroup::BCH);
  CHECK(group_of(LogicalChannel::RACH) == ChannelGroup::CCCH);
  CHECK(group_of(LogicalChannel::PCH) == ChannelGroup::CCCH);
  CHECK(group_of(LogicalChannel::NCH) == ChannelGroup::CCCH);
  CHECK(group_of(LogicalChannel::AGCH) == ChannelGroup::CCCH);
  CHECK(group_of(LogicalChannel::SDCCH) == ChannelGroup::DCCH);
  CHECK(group_of(LogicalChannel::SACCH) == ChannelGroup::DCCH);
  CHECK(group_of(LogicalChannel::FACCH) == ChannelGroup::DCCH);
  CHECK(group_of(LogicalChannel::TCH) == ChannelGroup::TCH_GROUP);
}

TEST_CASE("allowed_roles matches the ownership table for every channel") {
  REQUIRE(std::size(kOwnership) == kLogicalChannelCount);
  for (const auto& row : kOwnership) {
    auto ch = parse_logical_channel(row.name);
    REQUIRE(ch);
    CAPTURE(row.name);
    RoleSet roles = allowed_roles(*ch);
    CHECK(roles.contains(Role::SBS) == row.sbs);
    CHECK(roles.contains(Role::DBS) == row.dbs);
  }
  CHECK(allowed_roles(LogicalChannel::BCCH) == RoleSet{Role::SBS});
  CHECK(allowed_roles(LogicalChannel::TCH) == RoleSet{Role::DBS});
  CHECK(allowed_roles(LogicalChannel::SDCCH) == RoleSet{Role::SBS, Role::DBS});
}

TEST_CASE("functionality placement") {
  CHECK(functionality_roles(Functionality::PAGING) == RoleSet{Role::SBS});
  CHECK(functionality_roles(Functionality::SYNCHRONIZATION) == RoleSet{Role::SBS});
  CHECK(functionality_roles(Functionality::BROADCASTING) == RoleSet{Role::SBS});
  CHECK(functionality_roles(Functionality::DATA_TRAFFIC) == RoleSet{Role::DBS});
  for (Functionality f : kAllFunctionalities)
    CHECK(allowed_roles(functionality_channel(f)) == functionality_roles(f));
}

TEST_CASE("validate_bs_channels") {
  using C = LogicalChannel;
  CHECK(validate_bs_channels(Role::SBS, {C::FCCH, C::SCH, C::BCCH, C::PCH, C::RACH, C::AGCH, C::SDCCH}).ok());
  auto v = validate_bs_channels(Role::SBS, {C::TCH});
  REQUIRE(v.violations.size() == 1);
  CHECK(v.violations[0] == C::TCH);
  CHECK(validate_bs_channels(Role::DBS, {}).ok());

  SUBCASE("every subset lists each violating channel exactly once") {
    for (std::uint16_t mask = 0; mask <= ChannelSet::kFullMask; ++mask) {
      for (Role role : {Role::SBS, Role::DBS}) {
        std::set<std::string> expected;
        for (const auto& row : kOwnership)
          if (names_of(mask).contains(row.name) && !(role == Role::SBS ? row.sbs : row.dbs)) expected.insert(row.name);
        auto got = validate_bs_channels(role, ChannelSet::from_mask(mask)).violations;
        std::set<std::string> got_names;
        for (auto c : got) got_names.insert(std::string(to_string(c)));
        REQUIRE(got.size() == got_names.size());
        REQUIRE(got_names == expected);
      }
    }
  }
}

TEST_CASE("is_permitted_combination agrees with the whitelist over all 2048 subsets") {
  int permitted = 0;
  for (std::uint32_t mask = 0; mask < (1u << kLogicalChannelCount); ++mask) {
    bool oracle = whitelist().contains(names_of(static_cast<std::uint16_t>(mask)));
    bool got = is_permitted_combination(ChannelSet::from_mask(static_cast<std::uint16_t>(mask)));
    CAPTURE(mask);
    REQUIRE(got == oracle);
    permitted += got;
  }
  CHECK(permitted == 4);
  using C = LogicalChannel;
  CHECK(is_permitted_combination({C::TCH, C::SACCH}));
  CHECK(is_permitted_combination({C::SDCCH, C::SACCH}));
  CHECK_FALSE(is_permitted_combination({C::BCCH, C::TCH}));
  for (const auto& combo : permitted_combinations()) CHECK(is_permitted_combination(combo));
}

TEST_CASE("default channel complements are legal for their role") {
  CHECK(validate_bs_channels(Role::SBS, default_channels(Role::SBS)).ok());
  CHECK(validate_bs_channels(Role::DBS, default_channels(Role::DBS)).ok());
  CHECK(default_channels(Role::SBS).contains(LogicalChannel::BCCH));
  CHECK(default_channels(Role::DBS).contains(LogicalChannel::TCH));
}

TEST_CASE("slot_start_time") {
  CHECK(slot_start_time({0, 0}) == 0);
  CHECK(slot_start_time({0, 1}) == 577);
  CHECK(slot_start_time({1, 0}) == 4616);
  CHECK_THROWS_AS(slot_start_time({0, 8}), std::out_of_range);
  CHECK_THROWS_AS(slot_start_time({0, -1}), std::out_of_range);
  Micros prev = -1;
  for (std::uint64_t f = 0; f <= 1000; ++f) {
    for (int s = 0; s < 8; ++s) {
      Micros t = slot_start_time({f, s});
      REQUIRE(t == static_cast<Micros>(f) * 4616 + s * 577);
      REQUIRE(t > prev);
      prev = t;
    }
  }
}

TEST_CASE("validate_carrier_pair") {
  const CarrierConfig sbs{50, 1, Role::SBS};
  CHECK(validate_carrier_pair(sbs, {60, 1, Role::DBS}).ok());
  auto same = validate_carrier_pair(sbs, {50, 1, Role::DBS});
  REQUIRE(same.violations.size() == 1);
  CHECK(same.violations[0] == CarrierViolation::ARFCN_COLLISION);
  auto color = validate_carrier_pair(sbs, {60, 2, Role::DBS});
  REQUIRE(color.violations.size() == 1);
  CHECK(color.violations[0] == CarrierViolation::COLOR_CODE_MISMATCH);
  CHECK(validate_carrier_pair(sbs, {50, 2, Role::DBS}).violations.size() == 2);
  CHECK_THROWS_AS(validate_carrier_pair({60, 1, Role::DBS}, {50, 1, Role::DBS}), RoleMismatch);
  CHECK_THROWS_AS(validate_carrier_pair(sbs, {60, 1, Role::SBS}), RoleMismatch);
}

TEST_CASE("channel names round-trip") {
  for (LogicalChannel c : kAllLogicalChannels) CHECK(parse_logical_channel(to_string(c)) == c);
  CHECK_FALSE(parse_logical_channel("XCH"));
}
