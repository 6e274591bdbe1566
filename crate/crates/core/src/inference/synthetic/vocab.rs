//! Word material for synthetic responses.
//!
//! Filler lists avoid the letters j, q, x and z, commas, the keyword lexicon
//! and every structural token below, so each inserted token moves exactly one
//! checker.

/// Tokens carrying exactly one occurrence of a tracked letter.
pub(crate) fn letter_tokens(letter: char) -> &'static [&'static str] {
    match letter.to_ascii_lowercase() {
        'j' => &["jam", "jet", "jog", "joy"],
        'q' => &["quest", "quilt", "quill", "quip"],
        'x' => &["box", "fox", "wax", "mix", "six"],
        'z' => &["zen", "zip", "zone", "zeal"],
        _ => &[],
    }
}

pub(crate) const CAPS_TOKENS: &[&str] = &[
    "NASA", "UNESCO", "HTML", "CPU", "GPS", "DNA", "NATO", "BBC", "CEO", "UNICEF", "FIFA",
];

pub(crate) const PLACEHOLDERS: &[&str] = &[
    "recipient", "sender", "amount", "contact", "signature", "author", "website", "phone",
];

/// Filler vocabulary for a language code; `None` for unknown codes.
pub(crate) fn filler(language: &str) -> Option<&'static [&'static str]> {
    Some(match language {
        "en" => ENGLISH,
        "fr" => FRENCH,
        "de" => GERMAN,
        "es" => SPANISH,
        "it" => ITALIAN,
        "pt" => PORTUGUESE,
        "ru" => RUSSIAN,
        "zh" => CHINESE,
        "ja" => JAPANESE,
        "ko" => KOREAN,
        _ => return None,
    })
}

pub(crate) fn terminator(language: &str) -> &'static str {
    match language {
        "zh" | "ja" => "\u{3002}",
        _ => ".",
    }
}

pub(crate) const ENGLISH: &[&str] = &[
    "the", "an", "and", "but", "or", "so", "very", "rather", "often", "always", "never", "soon",
    "then", "now", "here", "today", "calm", "bright", "gentle", "cold", "soft", "loud", "slow",
    "fast", "happy", "sad", "green", "blue", "red", "white", "dark", "small", "big", "tall",
    "short", "wide", "deep", "clean", "fresh", "sweet", "busy", "early", "late", "new", "old",
    "young", "brave", "clever", "proud", "ready", "careful", "honest", "polite", "strong",
    "tired", "eager", "humble", "lovely", "pretty", "useful", "wonderful", "curious", "silent",
    "steady", "sunny", "windy", "cloudy", "rainy", "we", "they", "she", "he", "it", "you",
    "our", "their", "some", "many", "few", "every", "each", "other", "such", "more", "most",
    "less", "again", "still", "also", "only", "well", "together", "outside", "inside", "around",
    "along", "across", "under", "over", "near", "far", "with", "without", "from", "into",
    "onto", "upon", "about", "after", "before", "during", "since", "until", "while", "because",
    "if", "when", "where", "how", "why", "walk", "run", "read", "write", "sing", "play", "look",
    "see", "hear", "feel", "think", "find", "keep", "hold", "bring", "carry", "make", "build",
    "grow", "open", "close", "start", "stop", "wait", "stay", "move", "turn", "talk", "speak",
    "listen", "learn", "teach", "visit", "return", "travel", "smile", "laugh", "rest", "sleep",
    "wake", "went", "came", "saw", "felt", "knew", "found", "kept", "held", "brought", "made",
    "built", "grew", "opened", "closed", "started", "stopped", "waited", "stayed", "moved",
    "turned", "talked", "spoke", "listened", "learned", "taught", "visited", "returned",
    "traveled", "smiled", "laughed", "rested", "slept", "woke", "softly", "slowly", "gladly",
    "kindly", "warmly", "brightly", "gently", "calmly", "nearly", "really", "truly", "surely",
    "mostly", "partly", "rarely", "seldom", "sometimes", "usually", "almost", "enough",
    "indeed", "perhaps", "certainly",
];

pub(crate) const FRENCH: &[&str] = &[
    "les", "une", "et", "mais", "donc", "très", "beau", "belle", "petit", "petite", "grand",
    "vert", "verte", "bleu", "rouge", "blanc", "blanche", "noir", "noire", "matin", "soir",
    "nuit", "ciel", "mer", "rivière", "chemin", "maison", "ville", "pays", "monde", "temps",
    "vent", "pluie", "soleil", "lune", "étoile", "fleur", "arbre", "forêt", "montagne", "eau",
    "feu", "terre", "pierre", "rue", "porte", "fenêtre", "livre", "lettre", "parole", "chanson",
    "histoire", "ami", "amie", "enfant", "enfants", "famille", "frère", "sœur", "père", "mère",
    "femme", "homme", "gens", "nous", "vous", "ils", "elles", "elle", "on", "avec", "sans",
    "pour", "dans", "sur", "sous", "vers", "après", "avant", "pendant", "depuis", "souvent",
    "parfois", "encore", "aussi", "tout", "tous", "toute", "rien", "personne", "autre", "même",
    "comme", "comment", "alors", "puis", "ensuite", "enfin", "voici", "voilà", "marcher",
    "parler", "chanter", "danser", "rire", "sourire", "rêver", "lire", "écrire", "aimer",
    "regarder", "écouter", "penser", "croire", "savoir", "pouvoir", "vouloir", "devoir",
    "aller", "partir", "rester", "tomber", "monter", "descendre", "passer", "porter", "donner",
    "prendre", "mettre", "ouvrir", "fermer", "commencer", "finir", "chercher", "trouver",
    "garder", "perdre", "gagner", "attendre", "entendre", "répondre", "demander", "apprendre",
    "comprendre", "calme", "clair", "froid", "chaud", "lent", "rapide", "heureuse", "ancien",
    "nouveau", "nouvelle", "vieille", "longue", "haut", "bas", "plein", "vide", "avons", "été",
    "était", "sont", "beaucoup", "peu", "leur", "leurs", "notre", "votre", "cette", "ces",
    "cet", "mon", "ton", "ses", "nos", "vos", "bientôt", "demain", "ensemble", "dehors",
    "dedans", "près", "loin", "autour", "matinée", "soirée", "semaine", "année", "saison",
    "printemps", "automne", "hiver", "lumière", "couleur", "chaleur", "douceur",
];

pub(crate) const GERMAN: &[&str] = &[
    "der", "die", "das", "den", "dem", "ein", "eine", "einen", "einem", "und", "aber", "oder",
    "sehr", "gut", "schön", "klein", "groß", "grün", "blau", "rot", "weiß", "morgen", "abend",
    "nacht", "himmel", "meer", "fluss", "weg", "haus", "stadt", "welt", "regen", "sonne",
    "mond", "stern", "blume", "baum", "wald", "berg", "wasser", "feuer", "erde", "stein",
    "straße", "tür", "fenster", "tisch", "buch", "brief", "lied", "geschichte", "freund",
    "freundin", "kinder", "familie", "bruder", "schwester", "vater", "mutter", "frau", "mann",
    "leute", "wir", "ihr", "sie", "er", "mit", "ohne", "für", "auf", "unter", "nach", "vor",
    "während", "seit", "immer", "oft", "manchmal", "noch", "schon", "auch", "alles", "nichts",
    "niemand", "andere", "wie", "warum", "weil", "dann", "endlich", "dort", "gehen", "sprechen",
    "singen", "lachen", "lächeln", "schlafen", "träumen", "lesen", "schreiben", "lieben",
    "sehen", "hören", "fühlen", "denken", "glauben", "wissen", "können", "wollen", "müssen",
    "kommen", "bleiben", "fallen", "steigen", "bringen", "geben", "nehmen", "öffnen",
    "schließen", "beginnen", "enden", "suchen", "finden", "halten", "verlieren", "gewinnen",
    "warten", "lernen", "verstehen", "ruhig", "klar", "kalt", "langsam", "schnell", "glücklich",
    "traurig", "einfach", "leicht", "schwer", "alt", "neu", "lang", "hoch", "tief", "voll",
    "nicht", "ist", "sind", "waren", "haben", "hatte", "wird", "werden", "unser", "unsere",
    "diese", "dieser", "heute", "gestern", "bald", "gemeinsam", "draußen", "drinnen", "nahe",
    "ferne", "herbst", "sommer", "frühling", "licht", "farbe", "wärme",
];

pub(crate) const SPANISH: &[&str] = &[
    "el", "los", "las", "unos", "unas", "pero", "muy", "blanco", "negro", "mañana", "noche",
    "río", "camino", "ciudad", "tiempo", "viento", "lluvia", "estrella", "árbol", "montaña",
    "agua", "fuego", "tierra", "piedra", "calle", "puerta", "ventana", "canción", "historia",
    "niño", "niña", "familia", "hermano", "hermana", "hombre", "nosotros", "ellos", "ellas",
    "él", "ella", "sin", "en", "hacia", "después", "siempre", "todavía", "también", "todo",
    "nadie", "otro", "otra", "cuando", "donde", "entonces", "luego", "allí", "caminar",
    "hablar", "bailar", "reír", "sonreír", "soñar", "escribir", "mirar", "escuchar", "creer",
    "salir", "caer", "llevar", "poner", "cerrar", "buscar", "ganar", "frío", "caliente",
    "sencillo", "nuevo", "nueva", "largo", "lleno", "vacío", "fueron", "hemos", "están",
    "estaba", "nuestro", "nuestra", "estos", "hoy", "ayer", "pronto", "fuera", "cerca", "otoño",
    "invierno", "verano", "niños", "señor", "año", "español", "hermoso", "pueblo", "bueno",
    "mucho", "poco", "ahora", "usted", "cuándo", "dónde", "mientras", "ninguno", "alguien",
    "algún", "madera", "hierro",
];

pub(crate) const ITALIAN: &[&str] = &[
    "lo", "gli", "uno", "ma", "molto", "bene", "bello", "bella", "piccolo", "piccola", "rosso",
    "bianco", "nero", "mattina", "sera", "notte", "mare", "fiume", "strada", "città", "paese",
    "mondo", "pioggia", "sole", "stella", "fiore", "albero", "bosco", "montagna", "fuoco",
    "pietra", "finestra", "tavolo", "lettera", "storia", "amico", "amica", "bambino", "bambini",
    "famiglia", "fratello", "sorella", "donna", "uomo", "noi", "voi", "loro", "lui", "lei",
    "per", "su", "sotto", "verso", "dopo", "prima", "spesso", "ancora", "anche", "tutto",
    "niente", "nessuno", "ogni", "altro", "come", "perché", "allora", "poi", "infine", "là",
    "camminare", "parlare", "cantare", "ballare", "ridere", "sorridere", "dormire", "sognare",
    "leggere", "scrivere", "amare", "guardare", "ascoltare", "sentire", "pensare", "credere",
    "sapere", "potere", "volere", "venire", "andare", "partire", "restare", "cadere", "salire",
    "scendere", "portare", "dare", "prendere", "mettere", "aprire", "chiudere", "cominciare",
    "finire", "cercare", "trovare", "tenere", "perdere", "vincere", "aspettare", "imparare",
    "capire", "chiaro", "freddo", "caldo", "veloce", "felice", "semplice", "vecchio", "nuovo",
    "nuova", "lungo", "pieno", "vuoto", "sono", "siamo", "erano", "abbiamo", "hanno", "nostro",
    "nostra", "oggi", "ieri", "presto", "insieme", "fuori", "vicino", "lontano", "autunno",
    "colore", "calore", "degli", "delle", "nella", "nelle", "della", "dello", "che", "giorno",
    "gatto", "cavallo", "figlio", "chiesa", "chiave", "occhio", "orecchio", "ghiaccio",
    "adesso", "sulla", "tutti",
];

pub(crate) const PORTUGUESE: &[&str] = &[
    "os", "as", "um", "uma", "mas", "muito", "bem", "vermelho", "branco", "preto", "manhã",
    "noite", "céu", "rio", "caminho", "cidade", "chuva", "lua", "estrela", "árvore", "floresta",
    "montanha", "água", "fogo", "pedra", "rua", "livro", "canção", "história", "criança",
    "família", "irmão", "irmã", "pai", "mãe", "mulher", "homem", "nós", "eles", "elas", "ele",
    "ela", "com", "sem", "em", "sob", "depois", "ainda", "também", "tudo", "ninguém", "outro",
    "outra", "onde", "então", "enfim", "ali", "caminhar", "falar", "rir", "sorrir", "sonhar",
    "ler", "escrever", "olhar", "ouvir", "acreditar", "vir", "sair", "ficar", "cair", "descer",
    "levar", "pôr", "fechar", "começar", "procurar", "ganhar", "frio", "simples", "velho",
    "novo", "nova", "longo", "curto", "cheio", "não", "são", "está", "estão", "foram", "temos",
    "nosso", "nossa", "estes", "ontem", "logo", "fora", "perto", "longe", "outono", "verão",
    "cor", "coração", "canções", "irmãos", "mãos", "pão",
];

pub(crate) const RUSSIAN: &[&str] = &[
    "но", "или", "очень", "хорошо", "красивый", "маленький", "большой", "зелёный", "синий",
    "красный", "белый", "чёрный", "утро", "вечер", "ночь", "небо", "море", "река", "дорога",
    "дом", "город", "страна", "мир", "время", "ветер", "дождь", "солнце", "луна", "звезда",
    "цветок", "дерево", "лес", "гора", "вода", "огонь", "земля", "камень", "улица", "дверь",
    "окно", "стол", "книга", "письмо", "песня", "история", "друг", "подруга", "ребёнок",
    "семья", "брат", "сестра", "отец", "мать", "женщина", "мужчина", "люди", "мы", "вы", "они",
    "он", "она", "без", "для", "на", "под", "после", "до", "всегда", "часто", "иногда", "ещё",
    "уже", "тоже", "всё", "ничего", "никто", "каждый", "другой", "как", "когда", "где",
    "почему", "потому", "тогда", "потом", "наконец", "здесь", "там", "идти", "говорить", "петь",
    "танцевать", "смеяться", "улыбаться", "спать", "мечтать", "читать", "писать", "любить",
    "смотреть", "слушать", "чувствовать", "думать", "верить", "знать", "хотеть", "приходить",
    "уходить", "оставаться", "падать", "нести", "давать", "брать", "открывать", "закрывать",
    "начинать", "искать", "находить", "держать", "терять", "ждать", "учиться", "понимать",
    "тихий", "ясный", "холодный", "тёплый", "медленный", "быстрый", "счастливый", "грустный",
    "простой", "лёгкий", "трудный", "старый", "новый", "длинный", "короткий", "высокий",
    "полный", "пустой",
];

pub(crate) const CHINESE: &[&str] = &[
    "今天天气很好", "我们一起散步", "河边的风很温柔", "阳光照在山上", "孩子们在公园里玩", "老师认真地讲课", "城市的夜晚很安静", "春天的花开得很美",
    "他喜欢读书写字", "朋友们一起吃饭", "妈妈在厨房做饭", "小鸟在树上唱歌", "我们慢慢地走回家", "窗外下着小雨", "远处的山很高", "湖水清澈见底",
    "大家都很开心", "晚上的月亮很圆", "他每天早上跑步", "这条路很长", "天空中有白云", "她笑得很温暖", "秋天的叶子变黄了", "火车开得很快",
    "我们明天再见面", "图书馆里很安静", "冬天的雪很白", "时间过得真快", "海边的沙子很软", "他们在唱一首歌",
];

pub(crate) const JAPANESE: &[&str] = &[
    "今日は天気がいいです", "私たちは川沿いを歩いた", "子供たちが公園で遊ぶ", "先生はゆっくり話します", "夜の町はとても静かです", "春の花がきれいに咲いた",
    "友達とご飯を食べた", "母は台所で料理をする", "鳥が木の上で歌っている", "窓の外は小雨が降る", "遠くの山はとても高い", "湖の水は澄んでいる",
    "みんな楽しそうです", "夜の月はまるいです", "彼は毎朝走っています", "この道はとても長い", "空に白い雲がある", "彼女は優しく笑った", "秋の葉が黄色くなった",
    "電車はとても速い", "また明日会いましょう", "図書館は静かです", "冬の雪は白いです", "時間が経つのは早い", "海辺の砂は柔らかい", "彼らは歌を歌っている",
];

pub(crate) const KOREAN: &[&str] = &[
    "오늘은", "날씨가", "좋습니다", "우리는", "친구들과", "함께", "강을", "따라", "걸었습니다", "아이들이", "공원에서", "놀고",
    "있습니다", "선생님은", "천천히", "말합니다", "밤의", "도시는", "조용합니다", "봄에는", "꽃이", "예쁘게", "피었습니다", "어머니는",
    "부엌에서", "요리를", "합니다", "새가", "나무", "위에서", "노래합니다", "창밖에는", "비가", "내립니다", "산은", "높습니다", "호수의",
    "물은", "맑습니다", "모두", "즐거워", "보입니다", "달이", "둥글다", "그는", "매일", "아침", "달립니다", "길은", "깁니다",
    "하늘에", "구름이", "그녀는", "웃었다", "기차는", "빠릅니다", "내일", "다시", "만나요", "도서관은", "겨울의", "눈은", "하얗다",
    "시간이", "빨리", "지나갑니다", "바다의", "모래는", "부드럽다",
];
