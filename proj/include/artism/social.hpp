#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "artism/canonical.hpp"

namespace artism::social {

using Tick = std::int64_t;

enum class PostKind { artwork, comment, published_view, user_post };
enum class Provenance { agent_generated, user_authored };

std::string_view to_string(PostKind kind);
std::string_view to_string(Provenance p);
PostKind post_kind_from(std::string_view s);
Provenance provenance_from(std::string_view s);

struct PostId {
    Tick tick = 0;
    std::uint64_t seq = 0;

    static std::optional<PostId> parse(std::string_view id);
    std::string str() const;
    auto operator<=>(const PostId&) const = default;
};

inline bool is_user_author(std::string_view author_id) { return author_id.substr(0, 5) == "user:"; }

struct PublicPost {
    std::string post_id;
    std::string author_id;
    Tick tick = 0;
    PostKind kind = PostKind::artwork;
    std::string content;
    std::optional<std::string> reply_to;
    std::optional<std::string> image_prompt;
    Provenance provenance = Provenance::agent_generated;

    bool operator==(const PublicPost&) const = default;
};

void to_json(Json& j, const PublicPost& p);
void from_json(const Json& j, PublicPost& p);

struct FeedPage {
    std::vector<PublicPost> posts;
    std::optional<std::string> next_cursor;
};

inline constexpr std::size_t kMaxPageSize = 100;

/// Global public post store; posts are kept in publication order, which is
/// ascending (tick, seq).
class PostStore {
public:
    /// Id the next post published at `tick` would receive, skipping `pending` reserved ids.
    std::string next_post_id(Tick tick, std::size_t pending = 0) const;

    /// Validates invariants and appends. Throws InvalidPost, DanglingReply, DuplicatePostId.
    const std::string& publish(PublicPost post);

    /// Reverse chronological page strictly after `cursor`. Throws UnknownCursor; page in [1, 100].
    FeedPage build_feed(const std::optional<std::string>& viewer, const std::optional<std::string>& cursor,
                        std::size_t page) const;

    /// Posts with tick in [from, to), newest first.
    std::vector<const PublicPost*> in_window(Tick from, Tick to) const;

    const PublicPost* find(std::string_view post_id) const;
    const std::vector<PublicPost>& all() const { return posts_; }
    std::size_t size() const { return posts_.size(); }

private:
    std::vector<PublicPost> posts_;
    std::unordered_map<std::string, std::size_t> index_;
    std::map<Tick, std::uint64_t> per_tick_;
};

enum class Speaker { user, agent };

struct Turn {
    Speaker speaker = Speaker::user;
    std::string text;
    Tick tick = 0;
    bool operator==(const Turn&) const = default;
};

struct DialogueSession {
    std::string session_id;
    std::string user_name;
    std::string agent_id;
    std::uint64_t seed = 0;
    std::vector<Turn> transcript;

    /// "SESS-<session_id>", prefixed to every stored transcript memory.
    std::string sentinel() const { return "SESS-" + session_id; }
    bool operator==(const DialogueSession&) const = default;
};

void to_json(Json& j, const DialogueSession& s);
void from_json(const Json& j, DialogueSession& s);

class DialogueBook {
public:
    std::string next_session_id() const { return "s-" + std::to_string(sessions_.size() + 1); }
    DialogueSession& open(std::string session_id, std::string user_name, std::string agent_id, std::uint64_t seed);
    const DialogueSession* find(std::string_view session_id) const;
    DialogueSession* find(std::string_view session_id);
    const std::map<std::string, DialogueSession>& sessions() const { return sessions_; }

    /// Appends a user turn followed by an agent turn; keeps the transcript alternating.
    void record_exchange(std::string_view session_id, std::string user_text, std::string reply, Tick tick);

private:
    std::map<std::string, DialogueSession> sessions_;
};

}  // namespace artism::social
