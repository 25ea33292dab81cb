#include "schnapsen/cards.hpp"

namespace schnapsen {

char suit_char(Suit suit) {
  switch (suit) {
    case Suit::Clubs: return 'C';
    case Suit::Diamonds: return 'D';
    case Suit::Hearts: return 'H';
    case Suit::Spades: return 'S';
  }
  return '?';
}

char rank_char(Rank rank) {
  switch (rank) {
    case Rank::Ace: return 'A';
    case Rank::Ten: return 'T';
    case Rank::King: return 'K';
    case Rank::Queen: return 'Q';
    case Rank::Jack: return 'J';
  }
  return '?';
}

std::string to_string(Card card) { return {rank_char(card.rank), suit_char(card.suit)}; }

}  // namespace schnapsen
