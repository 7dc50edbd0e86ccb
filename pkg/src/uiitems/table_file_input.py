from PyQt5.QtWidgets import QWidget, QPushButton, QLineEdit, QHBoxLayout, QFileDialog
from PyQt5.QtCore import pyqtSignal

TABLE_FILTER = "Multiplication tables (*.mt *.mtb);;All files (*)"


class TableFileInput(QWidget):
    """Line edit plus Browse button for picking a multiplication table file."""

    fileSelected = pyqtSignal(str)

    def __init__(self, parent=None, placeholder="Select a table file (.mt / .mtb)",
                 dialog_title="Open multiplication table", initial_dir=""):
        super().__init__(parent)
        self.dialog_title = dialog_title
        self.initial_dir = initial_dir

        layout = QHBoxLayout(self)
        layout.setContentsMargins(10, 0, 10, 0)

        self.line_edit = QLineEdit()
        self.line_edit.setPlaceholderText(placeholder)
        self.line_edit.textChanged.connect(self._on_text_changed)

        self.browse_button = QPushButton("Browse")
        self.browse_button.clicked.connect(self.browse_file)

        layout.addWidget(self.line_edit)
        layout.addWidget(self.browse_button)
        self.apply_styling()

    def apply_styling(self):
        self.line_edit.setStyleSheet(
            """
            QLineEdit {
                border: 2px solid #ccc;
                border-radius: 8px;
                padding: 8px;
                color: black;
                background-color: white;
            }
        """
        )

    def path(self):
        """Selected path, or None when the field is empty."""
        text = self.line_edit.text().strip()
        return text or None

    def set_path(self, path):
        self.line_edit.setText(path)

    def _on_text_changed(self, text):
        if text.strip():
            self.fileSelected.emit(text.strip())

    def browse_file(self):
        fname, _ = QFileDialog.getOpenFileName(
            self, self.dialog_title, self.initial_dir, TABLE_FILTER
        )
        if fname:
            # textChanged emits fileSelected
            self.line_edit.setText(fname)
