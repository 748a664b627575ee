"""Built-in stopword lists for English and German, overridable via file."""
from __future__ import annotations

from dataclasses import dataclass

_EN = """
a about above after again against all am an and any are aren as at be because
been before being below between both but by can cannot could couldn did didn
do does doesn doing don down during each few for from further had hadn has
hasn have haven having he her here hers herself him himself his how i if in
into is isn it its itself just me more most mustn my myself no nor not now of
off on once only or other our ours ourselves out over own same shan she should
shouldn so some such than that the their theirs them themselves then there
these they this those through to too under until up very was wasn we were
weren what when where which while who whom why will with won would wouldn you
your yours yourself yourselves
"""

_DE = """
aber alle allem allen aller alles als also am an andere anderem anderen
anderer anderes auch auf aus bei bin bis bist da damit dann das dass dein
deine dem den denn der des dessen dich die dies diese diesem diesen dieser
dieses dir doch dort du durch ein eine einem einen einer eines er es etwas
euer eure für gegen gewesen hab habe haben hat hatte hatten hier hin hinter
ich ihm ihn ihnen ihr ihre im in ist ja jede jedem jeden jeder jedes jene
jenem jenen jener jenes kann kein keine keinem keinen keiner können könnte
machen man mein meine mich mir mit muss musste nach nicht nichts noch nun nur
ob oder ohne sehr sein seine sich sie sind so soll sollte sondern sonst um und
uns unser unter viel vom von vor war waren warst was weil weiter welche
welchem welchen welcher welches wenn werde werden wie wieder will wir wird
wirst wo wollen wollte während würde würden zu zum zur zwar zwischen
"""


@dataclass(frozen=True)
class StopwordList:
    lang: str
    words: frozenset

    def __post_init__(self):
        if not self.words:
            raise ValueError(f"empty stopword list for language {self.lang!r}")


_BUILTIN = {
    "en": frozenset(_EN.split()),
    "de": frozenset(_DE.split()),
}


def builtin_stopwords(lang: str) -> StopwordList:
    if lang not in _BUILTIN:
        raise KeyError(f"no built-in stopword list for language {lang!r}")
    return StopwordList(lang=lang, words=_BUILTIN[lang])


def load_stopwords(path, lang: str) -> StopwordList:
    """Read a one-token-per-line UTF-8 stopword file."""
    with open(path, encoding="utf-8") as fh:
        words = frozenset(line.strip().lower() for line in fh if line.strip())
    return StopwordList(lang=lang, words=words)
