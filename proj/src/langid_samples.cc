// Sample text used to build the bundled language profiles.

#include "langid_samples.h"

namespace lyricbench::langid::samples {

const char* const kEnglish = R"(
The artist is talking about the money he made when he was young and how the
people around him changed once he became famous. This line refers to the
neighborhood where he grew up, a place where everyone was trying to get out.
He says that his friends were always there for him, even when things were
hard and nobody believed in his music. In this verse the rapper explains
that he is not afraid of anything because he has already seen the worst.
The proverb means that people who are always on the move never put down
roots or accumulate responsibilities. She is describing the feeling of
being alone in a big city, without a home and without anyone who knows her
name. The song was written after the band broke up, and the lyrics reflect
the anger and the sadness of that time. When he says that his eyes are red,
he is referring to smoking weed all night with his crew. The word bread is
slang for money, and he wants to make sure that his family will never be
hungry again. This is a reference to a famous movie about a boxer who
fought his way to the top. He is riding in the passenger seat of the car,
which is what riding shotgun means. The chorus repeats the idea that love
is not enough when trust has been broken. Here the singer admits that he
made mistakes, but he asks for another chance. It is a play on words,
because the same phrase can mean two different things. They were living
in the projects, and the police would come by every night. He thinks that
the industry is fake and that most other rappers only care about fame and
what they can buy with it. Her mother told her to keep her head up and to
stay in school, and this line is a tribute to her. The verse describes a
party that went on until the morning, with music, drinks and dancing.
)";

const char* const kFrench = R"(
Ceci n'est pas une simple chanson, c'est une histoire sur la vie dans les
quartiers de la ville. L'artiste parle de l'argent qu'il a gagné quand il
était jeune et de la façon dont les gens autour de lui ont changé. Cette
phrase fait référence au quartier où il a grandi, un endroit où tout le
monde essayait de partir. Il dit que ses amis étaient toujours là pour lui,
même quand les choses étaient difficiles et que personne ne croyait en sa
musique. Dans ce couplet, le rappeur explique qu'il n'a peur de rien parce
qu'il a déjà vu le pire. Le proverbe signifie que les personnes qui sont
toujours en mouvement ne prennent jamais racine. Elle décrit le sentiment
d'être seule dans une grande ville, sans maison et sans personne qui
connaît son nom. La chanson a été écrite après la séparation du groupe, et
les paroles reflètent la colère et la tristesse de cette époque. Quand il
dit que ses yeux sont rouges, il parle de la fumée et de la nuit passée
avec ses amis. Le mot pain est un terme d'argot pour l'argent, et il veut
que sa famille n'ait plus jamais faim. C'est une allusion à un film célèbre
sur un boxeur qui s'est battu pour arriver au sommet. Le refrain répète
l'idée que l'amour ne suffit pas quand la confiance est brisée. Ici le
chanteur admet qu'il a fait des erreurs, mais il demande une autre chance.
C'est un jeu de mots, parce que la même expression peut avoir deux sens.
Sa mère lui a dit de garder la tête haute et de rester à l'école.
)";

const char* const kSpanish = R"(
Esta canción habla de la vida en los barrios de la ciudad y de la gente
que vive allí. El artista habla del dinero que ganó cuando era joven y de
cómo cambiaron las personas a su alrededor cuando se hizo famoso. Esta
línea se refiere al barrio donde creció, un lugar donde todos intentaban
salir. Dice que sus amigos siempre estaban con él, incluso cuando las cosas
eran difíciles y nadie creía en su música. En este verso el rapero explica
que no tiene miedo de nada porque ya ha visto lo peor. El refrán significa
que las personas que siempre están en movimiento nunca echan raíces. Ella
describe la sensación de estar sola en una gran ciudad, sin casa y sin
nadie que conozca su nombre. La canción fue escrita después de que el grupo
se separó, y la letra refleja la rabia y la tristeza de aquella época.
Cuando dice que sus ojos están rojos, se refiere a fumar toda la noche con
sus amigos. La palabra pan es una expresión para el dinero, y quiere que su
familia nunca vuelva a pasar hambre. Es una referencia a una película famosa
sobre un boxeador que luchó para llegar a la cima. El estribillo repite la
idea de que el amor no es suficiente cuando se ha perdido la confianza.
Aquí el cantante admite que cometió errores, pero pide otra oportunidad.
Es un juego de palabras, porque la misma frase puede tener dos sentidos.
Su madre le dijo que mantuviera la cabeza en alto y que siguiera estudiando.
)";

const char* const kGerman = R"(
Dieses Lied erzählt vom Leben in den Vierteln der Stadt und von den
Menschen, die dort wohnen. Der Künstler spricht über das Geld, das er als
junger Mann verdient hat, und darüber, wie sich die Leute um ihn herum
verändert haben, als er berühmt wurde. Diese Zeile bezieht sich auf die
Gegend, in der er aufgewachsen ist, ein Ort, an dem jeder wegwollte. Er
sagt, dass seine Freunde immer für ihn da waren, auch wenn die Dinge schwer
waren und niemand an seine Musik geglaubt hat. In dieser Strophe erklärt
der Rapper, dass er vor nichts Angst hat, weil er schon das Schlimmste
gesehen hat. Das Sprichwort bedeutet, dass Menschen, die immer unterwegs
sind, niemals Wurzeln schlagen. Sie beschreibt das Gefühl, allein in einer
großen Stadt zu sein, ohne ein Zuhause und ohne jemanden, der ihren Namen
kennt. Das Lied wurde geschrieben, nachdem sich die Band getrennt hatte,
und der Text spiegelt die Wut und die Traurigkeit dieser Zeit wider. Wenn
er sagt, dass seine Augen rot sind, meint er das Rauchen mit seinen Freunden
die ganze Nacht. Das Wort Brot ist ein Ausdruck für Geld, und er will, dass
seine Familie nie wieder hungern muss. Der Refrain wiederholt die Idee, dass
Liebe nicht genug ist, wenn das Vertrauen zerbrochen ist. Hier gibt der
Sänger zu, dass er Fehler gemacht hat, aber er bittet um eine neue Chance.
Es ist ein Wortspiel, weil derselbe Ausdruck zwei Bedeutungen haben kann.
Seine Mutter sagte ihm, er solle den Kopf oben behalten und in der Schule
bleiben.
)";

}  // namespace lyricbench::langid::samples
