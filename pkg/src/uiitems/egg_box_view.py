from PyQt5.QtWidgets import QWidget, QTextEdit, QVBoxLayout
from PyQt5.QtGui import QFont


class EggBoxView(QWidget):
    """Read-only monospace view for verdicts, witnesses and egg-box diagrams."""

    def __init__(self, parent=None):
        super().__init__(parent)
        self.initUI()

    def initUI(self):
        layout = QVBoxLayout(self)

        self.text_edit = QTextEdit()
        self.text_edit.setReadOnly(True)
        self.text_edit.setLineWrapMode(QTextEdit.NoWrap)
        self.text_edit.setPlaceholderText("The verdict and egg-box diagram appear here...")
        font = QFont("Courier New")
        font.setStyleHint(QFont.Monospace)
        self.text_edit.setFont(font)
        self.text_edit.setStyleSheet(
            """
            QTextEdit {
                background-color: rgba(205, 235, 240, 0.6);
                color: black;
                border-radius: 10px;
            }
        """
        )
        layout.addWidget(self.text_edit)

    def setText(self, text):
        self.text_edit.setPlainText(text)

    def text(self):
        return self.text_edit.toPlainText()

    def show_result(self, result, egg_box_text=None):
        """Render a MembershipResult and, when given, the egg-box diagram."""
        lines = [
            f"{'MEMBER' if result.member else 'NOT A MEMBER'} of {result.variety}"
        ]
        if result.witness:
            lines.append("")
            lines.append("Witness:")
            for key, value in sorted(result.witness.items()):
                lines.append(f"  {key}: {value}")
        if egg_box_text:
            lines.append("")
            lines.append(egg_box_text)
        self.setText("\n".join(lines))
