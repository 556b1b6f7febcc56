// Stage lists for the 24 training schedules, kept as one TSV blob so a
// transcription error is a one-line fix. A..H build their own pretraining
// from scratch; I..X start from an external pretrained model. Each
// schedule in I..P is its A..H counterpart with ext prepended; Q..X drop
// the nsq stage.

namespace versekit {

const char* kScheduleTableTsv =
    "A\tnsq,n1sq,n1,auto\n"
    "B\tnsq,n1sq,n1\n"
    "C\tnsq,n1sq,auto\n"
    "D\tnsq,n1sq\n"
    "E\tnsq,n1,auto\n"
    "F\tnsq,n1\n"
    "G\tnsq,auto\n"
    "H\tnsq\n"
    "I\text,nsq,n1sq,n1,auto\n"
    "J\text,nsq,n1sq,n1\n"
    "K\text,nsq,n1sq,auto\n"
    "L\text,nsq,n1sq\n"
    "M\text,nsq,n1,auto\n"
    "N\text,nsq,n1\n"
    "O\text,nsq,auto\n"
    "P\text,nsq\n"
    "Q\text,n1sq,n1,auto\n"
    "R\text,n1sq,n1\n"
    "S\text,n1sq,auto\n"
    "T\text,n1sq\n"
    "U\text,n1,auto\n"
    "V\text,n1\n"
    "W\text,auto\n"
    "X\text\n";

}  // namespace versekit
