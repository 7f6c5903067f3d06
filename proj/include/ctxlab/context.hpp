#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctxlab {

/// Author of a context fragment. Every fragment carries one.
enum class Role { User, Agent, System, Tool };

std::string_view role_name(Role role);
Role role_from_name(std::string_view name);

/// One role-tagged piece of content. Plain text unless `media_type` is set,
/// in which case `text` holds an opaque payload (never embedded, never parsed).
struct Fragment {
    Role role = Role::User;
    std::string text;
    std::string media_type;

    bool is_text() const { return media_type.empty(); }
    friend bool operator==(const Fragment&, const Fragment&) = default;
};

/// A context item: an ordered list of role-tagged fragments, closed under
/// concatenation. The default-constructed item is the empty item and acts as
/// a two-sided identity; constructing from an empty string also yields it, so
/// structural equality and the identity laws agree.
class ContextItem {
  public:
    ContextItem() = default;

    ContextItem(std::string text, Role role = Role::User) {
        if (!text.empty()) fragments_.push_back({role, std::move(text), {}});
    }
    ContextItem(const char* text, Role role = Role::User)
        : ContextItem(std::string(text), role) {}

    /// Opaque multimodal payload with a media-type tag.
    static ContextItem payload(std::string bytes, std::string media_type,
                               Role role = Role::User);

    bool empty() const { return fragments_.empty(); }
    std::size_t fragment_count() const { return fragments_.size(); }
    const std::vector<Fragment>& fragments() const { return fragments_; }

    /// True if any fragment carries a media-type tag.
    bool has_payload() const;

    /// Flat text rendering: text fragments joined in order, payloads skipped.
    std::string text() const;

    /// Transcript rendering: adjacent fragments of equal role merged.
    std::vector<Fragment> transcript() const;

    ContextItem& append(const ContextItem& other);
    ContextItem& append(Fragment fragment);

    friend ContextItem operator+(ContextItem lhs, const ContextItem& rhs) {
        lhs.append(rhs);
        return lhs;
    }
    ContextItem& operator+=(const ContextItem& other) { return append(other); }

    friend bool operator==(const ContextItem&, const ContextItem&) = default;

  private:
    std::vector<Fragment> fragments_;
};

/// In-order concatenation; empty operands contribute nothing.
ContextItem concat(std::span<const ContextItem> items);
ContextItem concat(std::initializer_list<ContextItem> items);

/// Order-sensitive repetition: item concatenated with itself `count` times.
ContextItem repeat(const ContextItem& item, std::size_t count);

}  // namespace ctxlab
