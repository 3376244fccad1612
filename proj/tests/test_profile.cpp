#include <algorithm>
#include <set>

#include "doctest.h"
#include "sealedbottle/errors.hpp"
#include "sealedbottle/profile.hpp"
#include "sealedbottle/rng.hpp"
#include "sealedbottle/sha256.hpp"

using namespace sbtl;

TEST_CASE("normalization strips case, whitespace and punctuation") {
  CHECK(normalize_attribute("Computer  Science!") == "computerscience");
  CHECK(normalize_attribute("hello-world") == "helloworld");
  CHECK(normalize_attribute("  spaced\tout  ") == "spacedout");
}

TEST_CASE("normalization folds accents to base letters") {
  CHECK(normalize_attribute("café") == "cafe");
  CHECK(normalize_attribute("naïve") == "naive");
  CHECK(normalize_attribute("Škoda") == "skoda");
  CHECK(normalize_attribute("Ångström") == "angstrom");
}

TEST_CASE("normalization folds a trailing plural s") {
  CHECK(normalize_attribute("Dogs") == "dog");
  CHECK(normalize_attribute("boss") == "boss");  // ss endings stay
  CHECK(normalize_attribute("glass") == "glass");
  CHECK(normalize_attribute("cafés") == "cafe");
}

TEST_CASE("normalization rejects empty results") {
  CHECK_THROWS_AS(normalize_attribute("!!!"), Error);
  CHECK_THROWS_AS(normalize_attribute("   "), Error);
  CHECK_THROWS_AS(normalize_attribute("s"), Error);  // plural rule empties it
  try {
    normalize_attribute("...");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_after_normalization);
  }
}

TEST_CASE("normalization is idempotent") {
  DetRng rng(42);
  const std::string pool =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,!-_ss";
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string raw;
    const std::size_t len = 1 + rng.below(12);
    for (std::size_t k = 0; k < len; ++k) raw.push_back(pool[rng.below(pool.size())]);
    std::string once;
    try {
      once = normalize_attribute(raw);
    } catch (const Error&) {
      continue;
    }
    CHECK(normalize_attribute(once) == once);
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("attribute hashing is deterministic and salt-sensitive") {
  const Attribute a = make_attribute("tag", "music");
  const Hash256 salt1 = sha256(std::vector<std::uint8_t>{1});
  CHECK(hash_attribute(a) == hash_attribute(a));
  CHECK(hash_attribute(a, salt1) == hash_attribute(a, salt1));
  CHECK(hash_attribute(a) != hash_attribute(a, salt1));

  // salt absent differs from the all-zero salt by construction
  CHECK(hash_attribute(a) != hash_attribute(a, Hash256{}));
}

TEST_CASE("distinct salts give distinct hashes") {
  const Attribute a = make_attribute("tag", "music");
  DetRng rng(7);
  std::set<Hash256> seen;
  for (int i = 0; i < 10'000; ++i) {
    seen.insert(hash_attribute(a, rng.bytes<32>()));
  }
  CHECK(seen.size() == 10'000);
}

TEST_CASE("profile vectors are sorted and permutation invariant") {
  std::vector<Attribute> attrs = {make_attribute("tag", "music"), make_attribute("tag", "chess"),
                                  make_attribute("city", "Paris")};
  const Profile p1 = Profile::from_attributes(attrs);
  std::reverse(attrs.begin(), attrs.end());
  const Profile p2 = Profile::from_attributes(attrs);

  const ProfileVector v1 = build_profile_vector(p1);
  const ProfileVector v2 = build_profile_vector(p2);
  CHECK(v1.hashes == v2.hashes);
  CHECK(std::is_sorted(v1.hashes.begin(), v1.hashes.end()));
  CHECK(v1.size() == 3);
  CHECK(derive_profile_key(v1) == derive_profile_key(v2));

  const Profile single = Profile::from_attributes({make_attribute("tag", "music")});
  CHECK(build_profile_vector(single).size() == 1);
}

TEST_CASE("indexed vector maps hash positions back to attributes") {
  const Profile p =
      Profile::from_attributes({make_attribute("tag", "music"), make_attribute("tag", "chess"),
                                make_attribute("city", "Paris")});
  const IndexedProfileVector iv = build_indexed_vector(p);
  REQUIRE(iv.hashes.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(hash_attribute(p.attributes[iv.attr_pos[i]]) == iv.hashes[i]);
  }
}

TEST_CASE("profile keys are 256-bit and sensitive to single entries") {
  DetRng rng(99);
  for (int i = 0; i < 200; ++i) {
    std::vector<Hash256> v(3);
    for (auto& h : v) h = rng.bytes<32>();
    std::sort(v.begin(), v.end());
    const ProfileKey k1 = derive_profile_key(std::span<const Hash256>(v.data(), v.size()));
    CHECK(k1.key.size() == 32);
    v[1] = rng.bytes<32>();
    const ProfileKey k2 = derive_profile_key(std::span<const Hash256>(v.data(), v.size()));
    CHECK(k1 != k2);
  }
  CHECK_THROWS_AS(derive_profile_key(std::span<const Hash256>()), Error);
}

TEST_CASE("profiles are sets with a size cap") {
  const Profile p =
      Profile::from_attributes({make_attribute("tag", "music"), make_attribute("Tag", "Music!")});
  CHECK(p.size() == 1);  // duplicates collapse after normalization
  CHECK_THROWS_AS(Profile::from_attributes({}), Error);

  std::vector<Attribute> many;
  for (int i = 0; i < 200; ++i) many.push_back(Attribute{"tag", "v" + std::to_string(i)});
  CHECK_THROWS_AS(Profile::from_attributes(many), Error);
}

TEST_CASE("request specs validate their shape") {
  const Attribute a = make_attribute("tag", "music");
  const Attribute b = make_attribute("tag", "chess");
  const Attribute c = make_attribute("tag", "golf");

  const RequestSpec spec = RequestSpec::make({a}, {b, c}, 1);
  CHECK(spec.necessary_count() == 1);
  CHECK(spec.attr_count() == 3);
  CHECK(spec.tolerated_unknowns() == 1);
  CHECK(spec.threshold() == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(RequestSpec::make({a}, {a, b}, 1), Error);  // overlap
  CHECK_THROWS_AS(RequestSpec::make({}, {b}, 2), Error);      // beta too big
  CHECK_THROWS_AS(RequestSpec::make({}, {b, c}, 0), Error);   // theta would be 0
}

TEST_CASE("request vectors sort each segment and hash to the profile key") {
  const RequestSpec spec =
      RequestSpec::make({make_attribute("tag", "music"), make_attribute("tag", "chess")},
                        {make_attribute("city", "Paris"), make_attribute("city", "Oslo")}, 1);
  const RequestVectors rv = build_request_vectors(spec);
  CHECK(std::is_sorted(rv.necessary_hashes.begin(), rv.necessary_hashes.end()));
  CHECK(std::is_sorted(rv.optional_hashes.begin(), rv.optional_hashes.end()));
  CHECK(rv.request_order.size() == 4);
  CHECK(rv.key == derive_profile_key(std::span<const Hash256>(rv.request_order.data(), 4)));
}
