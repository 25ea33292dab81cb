#pragma once

#include <bit>
#include <cstdint>
#include <string>

namespace schnapsen {

// Canonical order is fixed everywhere: suits Clubs..Spades, ranks Ace..Jack,
// card index = suit * 5 + rank in [0, 20).
enum class Suit : uint8_t { Clubs = 0, Diamonds, Hearts, Spades };
enum class Rank : uint8_t { Ace = 0, Ten, King, Queen, Jack };

inline constexpr int kNumSuits = 4;
inline constexpr int kNumRanks = 5;
inline constexpr int kDeckSize = 20;

struct Card {
  Suit suit;
  Rank rank;

  constexpr int index() const { return static_cast<int>(suit) * kNumRanks + static_cast<int>(rank); }
  friend constexpr bool operator==(Card, Card) = default;
};

constexpr Card card_from_index(int i) {
  return Card{static_cast<Suit>(i / kNumRanks), static_cast<Rank>(i % kNumRanks)};
}

// Ace=11, Ten=10, King=4, Queen=3, Jack=2. One suit sums to 30, the deck to 120.
constexpr int card_points(Rank rank) {
  switch (rank) {
    case Rank::Ace: return 11;
    case Rank::Ten: return 10;
    case Rank::King: return 4;
    case Rank::Queen: return 3;
    case Rank::Jack: return 2;
  }
  return 0;
}

// True if both cards share a suit and `a` outranks `b` (A > T > K > Q > J).
constexpr bool beats_in_suit(Card a, Card b) {
  return a.suit == b.suit && static_cast<int>(a.rank) < static_cast<int>(b.rank);
}

char suit_char(Suit suit);
char rank_char(Rank rank);
std::string to_string(Card card);  // "AC", "TD", "KH", "QS", "JC", ...

// Set of cards as a 20-bit mask, iterated in canonical order.
class CardSet {
 public:
  constexpr CardSet() = default;
  constexpr explicit CardSet(uint32_t bits) : bits_(bits) {}

  static constexpr CardSet full() { return CardSet((1u << kDeckSize) - 1); }
  static constexpr CardSet of_suit(Suit suit) { return CardSet(0x1fu << (static_cast<int>(suit) * kNumRanks)); }

  constexpr void add(Card c) { bits_ |= 1u << c.index(); }
  constexpr void remove(Card c) { bits_ &= ~(1u << c.index()); }
  constexpr bool contains(Card c) const { return (bits_ >> c.index()) & 1u; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr uint32_t bits() const { return bits_; }

  constexpr CardSet operator&(CardSet other) const { return CardSet(bits_ & other.bits_); }
  constexpr CardSet operator|(CardSet other) const { return CardSet(bits_ | other.bits_); }
  constexpr CardSet operator-(CardSet other) const { return CardSet(bits_ & ~other.bits_); }
  friend constexpr bool operator==(CardSet, CardSet) = default;

  class Iterator {
   public:
    constexpr explicit Iterator(uint32_t bits) : bits_(bits) {}
    constexpr Card operator*() const { return card_from_index(std::countr_zero(bits_)); }
    constexpr Iterator& operator++() {
      bits_ &= bits_ - 1;
      return *this;
    }
    friend constexpr bool operator==(Iterator, Iterator) = default;

   private:
    uint32_t bits_;
  };

  constexpr Iterator begin() const { return Iterator(bits_); }
  constexpr Iterator end() const { return Iterator(0); }

 private:
  uint32_t bits_ = 0;
};

}  // namespace schnapsen
