"""KML 2.2 track export for Google Earth."""

import math
import xml.etree.ElementTree as ET

KML_NS = "http://www.opengis.net/kml/2.2"


def kml_document(lla_points, name="gpssdr track") -> str:
    """Build a KML Document with one Placemark/LineString.

    lla_points: iterable of (lat_rad, lon_rad, alt_m). Coordinates are
    emitted as lon,lat,alt in degrees/meters per the KML schema.
    """
    ET.register_namespace("", KML_NS)
    kml = ET.Element(f"{{{KML_NS}}}kml")
    doc = ET.SubElement(kml, f"{{{KML_NS}}}Document")
    ET.SubElement(doc, f"{{{KML_NS}}}name").text = name
    placemark = ET.SubElement(doc, f"{{{KML_NS}}}Placemark")
    ET.SubElement(placemark, f"{{{KML_NS}}}name").text = "position track"
    line = ET.SubElement(placemark, f"{{{KML_NS}}}LineString")
    ET.SubElement(line, f"{{{KML_NS}}}altitudeMode").text = "absolute"
    coords = " ".join(
        f"{math.degrees(lon):.9f},{math.degrees(lat):.9f},{alt:.3f}"
        for lat, lon, alt in lla_points)
    ET.SubElement(line, f"{{{KML_NS}}}coordinates").text = coords
    return ET.tostring(kml, encoding="unicode", xml_declaration=True)


def write_kml(path, lla_points, name="gpssdr track"):
    with open(path, "w") as f:
        f.write(kml_document(lla_points, name=name))
