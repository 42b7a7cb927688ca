#include "geopulse/synth/lexicon.h"

#include <algorithm>

namespace geopulse::synth {
namespace {

const std::vector<Lexicon>& lexicons() {
  static const std::vector<Lexicon> all = {
      {"en",
       {"today",  "morning", "coffee",  "friends", "music",   "great",  "weekend", "school",
        "office", "lunch",   "happy",   "movie",   "game",    "love",   "family",  "market",
        "street", "city",    "photo",   "night",   "work",    "party",  "food",    "travel",
        "season", "team",    "match",   "news",    "birthday","garden", "book",    "dinner",
        "sunday", "monday",  "shopping","video",   "dance",   "beach",  "traffic", "phone",
        "train",  "bus",     "sunny",   "cloudy",  "tired",   "excited","walk",    "park",
        "colors", "concert", "recipe",  "student", "holiday", "bridge", "village", "smile",
        "festival","temple", "cricket", "football"},
       {"flood", "flooding", "landslide", "rain", "rescue", "evacuation", "river", "water",
        "storm", "damage"}},
      {"fr",
       {"aujourd'hui", "matin",  "café",    "amis",    "musique", "super",   "weekend",
        "école",       "bureau", "déjeuner","heureux", "film",    "jeu",     "amour",
        "famille",     "marché", "rue",     "ville",   "photo",   "nuit",    "travail",
        "fête",        "repas",  "voyage",  "saison",  "équipe",  "match",   "nouvelles",
        "anniversaire","jardin", "livre",   "dîner",   "dimanche","lundi",   "achats",
        "vidéo",       "danse",  "plage",   "trafic",  "téléphone","train",  "soleil",
        "nuageux",     "fatigué","balade",  "parc",    "couleurs","concert", "recette",
        "étudiant",    "vacances","pont",   "village", "sourire", "festival","temple"},
       {"inondation", "crue", "glissement", "pluie", "secours", "évacuation", "rivière", "eau",
        "tempête", "dégâts"}},
      {"es",
       {"hoy",     "mañana",  "café",     "amigos",  "música",  "genial",  "fin",
        "escuela", "oficina", "almuerzo", "feliz",   "película","juego",   "amor",
        "familia", "mercado", "calle",    "ciudad",  "foto",    "noche",   "trabajo",
        "fiesta",  "comida",  "viaje",    "temporada","equipo", "partido", "noticias",
        "cumpleaños","jardín","libro",    "cena",    "domingo", "lunes",   "compras",
        "video",   "baile",   "playa",    "tráfico", "teléfono","tren",    "soleado",
        "nublado", "cansado", "paseo",    "parque",  "colores", "concierto","receta",
        "estudiante","vacaciones","puente","pueblo", "sonrisa", "festival","templo"},
       {"inundación", "crecida", "deslizamiento", "lluvia", "rescate", "evacuación", "río",
        "agua", "tormenta", "daños"}},
      {"it",
       {"oggi",    "mattina", "caffè",    "amici",   "musica",  "bello",   "fine",
        "scuola",  "ufficio", "pranzo",   "felice",  "film",    "gioco",   "amore",
        "famiglia","mercato", "strada",   "città",   "foto",    "notte",   "lavoro",
        "festa",   "cibo",    "viaggio",  "stagione","squadra", "partita", "notizie",
        "compleanno","giardino","libro",  "cena",    "domenica","lunedì",  "spesa",
        "video",   "ballo",   "spiaggia", "traffico","telefono","treno",   "sole",
        "nuvoloso","stanco",  "passeggiata","parco", "colori",  "concerto","ricetta",
        "studente","vacanze", "ponte",    "paese",   "sorriso", "festival","tempio"},
       {"alluvione", "esondazione", "frana", "pioggia", "soccorso", "evacuazione", "fiume",
        "acqua", "tempesta", "danni"}},
  };
  return all;
}

}  // namespace

std::span<const Lexicon> bundled_lexicons() { return lexicons(); }

const Lexicon* find_lexicon(std::string_view language) {
  for (const auto& l : lexicons()) {
    if (l.language == language) return &l;
  }
  return nullptr;
}

std::span<const std::string_view> place_syllables() {
  static const std::vector<std::string_view> syllables = {
      "ka", "lo", "ri", "ma", "tan", "pur", "ga", "shi", "no", "ban", "dar", "vel",
      "ko", "thu", "ne", "sa", "bir", "jha", "dho", "lam", "pha", "su", "rak", "mi"};
  return syllables;
}

}  // namespace geopulse::synth
